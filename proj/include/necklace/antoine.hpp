#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "necklace/certify.hpp"
#include "necklace/geom.hpp"

/// Simple chains of linked solid tori and the nested defining sequences
/// (necklaces) built from them.
namespace necklace::antoine {

using geom::Circle3;
using geom::Plane3;
using geom::SolidTorus;
using geom::Tube;

enum class OrientationPattern {
    /// Child k lies in span(tangent, parent normal) for even k and in
    /// span(tangent, radial) for odd k.
    Alternating,
};

struct ChainParams {
    int q = 0;
    /// Child major radius divided by half the chord between consecutive centers.
    double child_major_scale = 0.0;
    /// Child minor radius divided by child major radius.
    double child_minor_ratio = 0.0;
    OrientationPattern orientation_pattern = OrientationPattern::Alternating;

    /// Throws PreconditionViolation when q < 3, q odd under the alternating
    /// pattern, or a ratio is out of range.
    void validate() const;
    bool operator==(const ChainParams&) const = default;
};

struct Chain {
    SolidTorus parent;
    std::vector<SolidTorus> children;
};

/// Boundary-sample containment margin relative to the parent minor radius.
inline constexpr double kContainmentMarginFraction = 1e-6;

struct ChainReport {
    bool disjoint = false;
    bool contained = false;
    bool regular_polygon = false;
    bool linking_pattern = false;
    bool null_homotopy_proxy = false;
    bool congruent = false;

    double min_separation = 0.0;        // min pairwise torus_separation
    double min_containment_margin = 0.0; // min over sampled child boundary of r_parent - d(P, parent core)
    double max_link_residual = 0.0;

    // First offending pair / child per failed flag (-1 when none).
    std::pair<int, int> disjoint_violation{-1, -1};
    int containment_violation = -1;
    int polygon_violation = -1;
    std::pair<int, int> linking_violation{-1, -1};
    int homotopy_violation = -1;

    [[nodiscard]] bool ok() const {
        return disjoint && contained && regular_polygon && linking_pattern && null_homotopy_proxy && congruent;
    }
    [[nodiscard]] std::string summary() const;
};

/// Solid torus whose core circle lies in `plane`, centered at `center`.
/// Throws BadRadii (R <= r or r <= 0) and CenterOffPlane.
[[nodiscard]] SolidTorus make_standard_torus(const Plane3& plane, const Point3& center, double R, double r);

/// Places q congruent children with centers on the regular q-gon inscribed in
/// the parent's core circle. Throws PreconditionViolation for invalid params
/// and Infeasible when the result fails verify_chain.
[[nodiscard]] Chain build_simple_chain(const SolidTorus& parent, const ChainParams& params);

/// Same placement without verification (used by search and fault tests).
[[nodiscard]] Chain place_simple_chain(const SolidTorus& parent, const ChainParams& params);

struct VerifyOptions {
    int boundary_major_samples = 96;
    int boundary_minor_samples = 24;
};

[[nodiscard]] ChainReport verify_chain(const Chain& chain, const VerifyOptions& options = {});

struct Stage {
    std::vector<SolidTorus> tori;
    std::vector<int> parent;  // index into previous stage, -1 at stage 1
    double max_diameter = 0.0;
};

/// Finite stages M_1 ⊃ M_2 ⊃ ... of a necklace. stages[0] is M_1.
struct DefiningSequence {
    std::vector<Stage> stages;
    std::vector<ChainParams> params;  // params[i] built stage i+2 from stage i+1
    double lambda = 0.0;              // max ratio of consecutive max diameters

    [[nodiscard]] int depth() const { return static_cast<int>(stages.size()); }
    [[nodiscard]] std::size_t torus_count() const;
    /// Chain formed by parent `index` of stage `level` (1-based) and its children.
    [[nodiscard]] Chain chain_at(int level, int index) const;
    void recompute_diameters();
};

/// Stage i+1 = chains of params_per_level[i] inside every stage-i torus.
/// Throws Infeasible naming the level that failed.
[[nodiscard]] DefiningSequence build_necklace(const SolidTorus& seed, const std::vector<ChainParams>& params_per_level,
                                              int depth);

/// As above with default_chain_params for each stage's minor/major ratio.
[[nodiscard]] DefiningSequence build_necklace_auto(const SolidTorus& seed, int depth);

struct NecklaceReport {
    std::vector<ChainReport> chains;  // every parent at stages 1..depth-1, in order
    std::vector<double> nesting_margin;  // per stage i>=2: min containment margin into stage i-1
    double lambda = 0.0;
    bool diameters_decay = false;

    [[nodiscard]] bool ok() const;
};

[[nodiscard]] NecklaceReport verify_necklace(const DefiningSequence& seq, const VerifyOptions& options = {});

// --- chain parameter defaults ----------------------------------------------

struct ChainSearchOptions {
    int q_max = 2000;
    double min_relative_separation = 0.05;  // torus_separation / child r
    double min_relative_containment = 1e-3; // margin / parent r
};

struct DefaultEntry {
    double ratio = 0.0;  // parent r / R
    ChainParams params;
};

/// Child ratios are tried in order min(parent_ratio, 0.25), 0.2, 0.1, 0.05;
/// for the first one that works, the minimal even q and, at that q, the
/// child_major_scale in {1.05, ..., 1.95} with the largest relative
/// separation. The winner is validated by verify_chain.
/// Throws Infeasible when nothing up to q_max passes.
[[nodiscard]] ChainParams search_chain_params(double parent_ratio, const ChainSearchOptions& options = {});

/// Table shipped in data/chain_defaults.json.
[[nodiscard]] const std::vector<DefaultEntry>& shipped_defaults();

/// Shipped entry for this ratio when one exists (relative match 1e-9),
/// otherwise search_chain_params.
[[nodiscard]] ChainParams default_chain_params(double parent_ratio);

// --- thinning ---------------------------------------------------------------

struct TubeCover {
    int n = 0;           // sides of the inscribed regular polygon
    double tube_radius = 0.0;  // 2 R (1 - cos(pi/N))
    double total_width = 0.0;  // 2 * n * tube_radius
    std::vector<Tube> tubes;
};

/// 4 N R (1 - cos(pi/N)), evaluated without cancellation.
[[nodiscard]] double circle_cover_total_width(double radius, long n);

/// Smallest N >= 3 whose side-line tubes have total width < eps; the tube
/// interiors cover the circle.
[[nodiscard]] TubeCover circle_tube_cover(const Circle3& circle, double eps);

/// Thinned minor radius as a fraction of the cover's tube radius.
inline constexpr double kThinningFraction = 5.0 / 16.0;
/// Relative floor below which thinning reports Degenerate.
inline constexpr double kDegenerateFraction = 1e-9;

struct ThinResult {
    DefiningSequence sequence;
    certify::PlankCertificate certificate;
    certify::CheckResult check;
};

/// Covers every core circle of stage `level` with circle_tube_cover (budget
/// eps / #circles), shrinks those minor radii to fit inside the tubes, shrinks
/// deeper stages where they would leave their thinned parents, re-verifies the
/// chains, and emits a certificate claiming eps / 2. Core circles never move.
/// Throws Degenerate when a required minor radius falls below
/// kDegenerateFraction of its parent's scale.
[[nodiscard]] ThinResult thin_to_tubes(const DefiningSequence& seq, int level, double eps);

/// The build-then-thin loop: stage i is thinned with schedule[i-1] before
/// stage i+1 is built inside it (params from default_chain_params).
[[nodiscard]] std::pair<DefiningSequence, std::vector<certify::PlankCertificate>> build_thinned_necklace(
    const SolidTorus& seed, const std::vector<double>& schedule, int depth);

}  // namespace necklace::antoine
