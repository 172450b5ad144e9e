#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "necklace/geom.hpp"
#include "necklace/shadow.hpp"

/// Plank-theorem bookkeeping. The plank theorem itself (a disk of radius eps
/// cannot be covered by strips of total width < 2 eps) is taken as given;
/// only its hypotheses are checked here.
namespace necklace::certify {

using geom::SolidTorus;
using geom::Strip2;
using geom::Tube;

struct CoverageEvidence {
    double sample_spacing = 0.0;  // max arc length between consecutive core samples
    double margin = 0.0;          // min slack of the worst sample, filled in by check_certificate
};

enum class Verdict { Valid, CoverageFail, WidthFail, Unchecked };

[[nodiscard]] std::string to_string(Verdict v);
[[nodiscard]] Verdict verdict_from_string(const std::string& s);

struct PlankCertificate {
    std::vector<Tube> tubes;
    int covered_level = 0;
    double total_width = 0.0;  // sum of 2 r over tubes
    double claimed_eps = 0.0;  // radius of the disk no shadow may contain
    CoverageEvidence evidence;
    Verdict verdict = Verdict::Unchecked;

    /// Recomputes total_width from the tubes.
    void recompute_total();
};

using Shape = std::variant<Tube, Strip2, SolidTorus>;

/// Tube: 2r. Strip: 2 * half_width. Torus of revolution: 2r, attained
/// across its core plane (every other direction sees at least that much).
[[nodiscard]] double width(const Tube& t);
[[nodiscard]] double width(const Strip2& s);
[[nodiscard]] double width(const SolidTorus& t);
[[nodiscard]] double width(const Shape& s);

using CoveredItem = std::variant<SolidTorus, Tube>;

struct CheckResult {
    Verdict verdict = Verdict::Unchecked;
    double margin = 0.0;  // worst coverage slack found
    double total_width = 0.0;
    std::optional<Point3> witness;  // uncovered sample on CoverageFail
    std::string detail;
};

/// (a) every item lies in the union of tube interiors, (b) the widths sum to
/// strictly less than 2 * claimed_eps. Torus items are checked by sampling the
/// core at the recorded spacing: a sample P is covered when some tube has
/// d(P, axis) + spacing/2 + r <= radius - min_radius/16; the Lipschitz
/// bound makes this a proof for the whole solid. Tube items must be parallel
/// to a certificate tube and contained in it.
[[nodiscard]] CheckResult check_certificate(const PlankCertificate& c, const std::vector<CoveredItem>& items);
[[nodiscard]] CheckResult check_certificate(const PlankCertificate& c, const std::vector<SolidTorus>& items);

struct CrossCheckEntry {
    double inscribed_radius = 0.0;
    double bound = 0.0;  // claimed_eps + pixel * sqrt(2)
};

struct CrossCheckReport {
    std::vector<CrossCheckEntry> planes;
    double max_observed = 0.0;
    double pixel = 0.0;
};

/// Rasterizes the items' outer shadow on each plane and asserts the
/// inscribed-disk radius stays within claimed_eps + pixel * sqrt(2).
/// Throws Contradiction with the offending plane when it does not.
[[nodiscard]] CrossCheckReport empirical_cross_check(const PlankCertificate& c, const std::vector<SolidTorus>& items,
                                                     const std::vector<geom::Plane3>& planes, double pixel);

/// Strip family covering the tubes' shadows on a plane (one strip of width
/// 2r per tube; disks become strips through their center).
[[nodiscard]] std::vector<Strip2> covering_strips(const std::vector<Tube>& tubes, const geom::Plane3& plane);

}  // namespace necklace::certify
