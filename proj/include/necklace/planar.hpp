#pragma once

#include <optional>
#include <string>
#include <vector>

#include "necklace/errors.hpp"
#include "necklace/shadow.hpp"
#include "necklace/vec.hpp"

/// Planar Cantor sets whose shadow on every line equals the shadow of the
/// polygon they live in.
namespace necklace::planar {

using shadow::Interval1;

/// Convex polygon, counterclockwise, nonempty interior.
class ConvexPoly2 {
public:
    /// Throws PreconditionViolation unless the vertices are strictly convex
    /// and counterclockwise (collinear triples are rejected too).
    static ConvexPoly2 make(std::vector<Vec2> vertices);

    [[nodiscard]] const std::vector<Vec2>& vertices() const { return v_; }
    [[nodiscard]] std::size_t size() const { return v_.size(); }
    [[nodiscard]] double area() const;
    [[nodiscard]] double diameter() const;
    [[nodiscard]] Vec2 centroid() const;  // vertex average
    /// Closed containment.
    [[nodiscard]] bool contains(const Vec2& p) const;

private:
    explicit ConvexPoly2(std::vector<Vec2> v) : v_(std::move(v)) {}
    std::vector<Vec2> v_;
};

/// x -> [a b; c d] x + (e, f).
struct Affine2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0, e = 0.0, f = 0.0;

    [[nodiscard]] Vec2 apply(const Vec2& p) const { return {a * p.x + b * p.y + e, c * p.x + d * p.y + f}; }
    /// (this o inner)(x) = this(inner(x)).
    [[nodiscard]] Affine2 compose(const Affine2& inner) const;
    [[nodiscard]] double determinant() const { return a * d - b * c; }
    [[nodiscard]] double max_singular_value() const;
    bool operator==(const Affine2&) const = default;

    /// Image of a convex polygon. Orientation-reversing maps get their
    /// vertex order flipped so the result stays counterclockwise.
    [[nodiscard]] ConvexPoly2 apply(const ConvexPoly2& p) const;
};

struct PlanarIFS {
    ConvexPoly2 root;
    std::vector<Affine2> maps;
    double lambda = 0.0;  // max singular value over the maps

    /// Throws PreconditionViolation for an empty map list, a singular map,
    /// lambda >= 1, or an image that leaves the root.
    static PlanarIFS make(const ConvexPoly2& root, std::vector<Affine2> maps);
};

/// Exact [min, max] of vertex . (cos angle, sin angle).
[[nodiscard]] Interval1 poly_line_shadow(const ConvexPoly2& p, double angle);

struct AnglePolicy {
    /// Edge normals and in-polygon vertex-pair normals of every polygon.
    bool critical = true;
    /// Normals of vertex pairs taken across different polygons, plus one angle
    /// between each consecutive pair of critical angles. Together these make
    /// the check exact; only used when the total vertex count is at most
    /// cross_pair_vertex_limit.
    bool cross_pairs = true;
    std::size_t cross_pair_vertex_limit = 600;
    /// Uniform grid step; <= 0 disables the grid.
    double grid_degrees = 1.0;
};

struct CoverVerdict {
    bool covered = true;
    bool pieces_inside = true;   // every piece vertex lies in the parent
    std::size_t angles_tested = 0;
    bool exact = false;          // the cross-pair angle set was used
    double min_overlap = 0.0;    // smallest overlap (or end slack) seen in the sweep
    std::optional<double> witness_angle;
    std::optional<Interval1> gap;
    std::string detail;
};

/// For each direction the union of piece intervals must equal the parent
/// interval. Interval endpoints are extremes of vertex projections, so the
/// ordering of every endpoint can only change where two vertices project to
/// the same value; checking those directions and one direction strictly
/// between each consecutive pair decides the cover for all directions.
/// Endpoints are compared up to 1e-12 of the projection scale, the size of the
/// rounding in the vertex arithmetic.
[[nodiscard]] CoverVerdict shadow_cover_check(const ConvexPoly2& parent, const std::vector<ConvexPoly2>& pieces,
                                              const AnglePolicy& policy = {});

/// Candidate angles used by shadow_cover_check, sorted in [0, pi).
[[nodiscard]] std::vector<double> cover_angles(const ConvexPoly2& parent, const std::vector<ConvexPoly2>& pieces,
                                               const AnglePolicy& policy, bool* exact = nullptr);

/// Level-k pieces: images of the root under every k-fold composition, ordered
/// lexicographically by map index (outermost first). Each level is checked
/// against the root; throws CoverBroken naming the first failing level.
[[nodiscard]] std::vector<ConvexPoly2> build_planar_cantor(const PlanarIFS& ifs, int depth,
                                                           const AnglePolicy& policy = {});

/// Images without the per-level check.
[[nodiscard]] std::vector<ConvexPoly2> planar_level(const PlanarIFS& ifs, int depth);

/// Euclidean distance between convex polygons, 0 when they meet.
[[nodiscard]] double poly_distance(const ConvexPoly2& a, const ConvexPoly2& b);

struct Separation {
    double min_distance = 0.0;  // over all pairs (infinity for < 2 pieces)
    int first = -1;             // closest pair
    int second = -1;
};

/// Minimum pairwise distance via a bounding-box sweep.
[[nodiscard]] Separation pairwise_separation(const std::vector<ConvexPoly2>& pieces);

/// The affine-regular hexagon with vertices (1,0), (1,1), (0,1), (-1,0),
/// (-1,-1), (0,-1).
[[nodiscard]] ConvexPoly2 integer_hexagon();

/// Pattern committed in data/hexagon_ifs.json: 12 maps found by
/// tools/search_hexagon_ifs. A witness that some hexagon pattern works, not a
/// reconstruction of any historical one.
[[nodiscard]] const PlanarIFS& shipped_hexagon_ifs();

struct TriangleCantor {
    std::vector<ConvexPoly2> collar;  // affine hexagons, per simplex, in input order
    std::vector<int> owner;           // simplex index per collar hexagon
    std::vector<ConvexPoly2> pieces;  // IFS pieces at the requested depth inside every collar hexagon
    CoverVerdict verdict;             // union of pieces against the union of simplices
};

/// Per simplex, an interior collar of affine hexagons covering its boundary;
/// the hexagon IFS is instantiated in each collar hexagon. Throws
/// PreconditionViolation for an empty list or a non-triangle / zero-area
/// simplex, and CollarFail when the shadows of the union of pieces differ
/// from those of the union of simplices at some tested angle.
[[nodiscard]] TriangleCantor triangle_union_cantor(const std::vector<ConvexPoly2>& simplices, int depth,
                                                   const PlanarIFS& ifs = shipped_hexagon_ifs(),
                                                   const AnglePolicy& policy = {});

/// Multi-parent variant of shadow_cover_check: for every angle the union of
/// piece intervals must equal the union of parent intervals.
[[nodiscard]] CoverVerdict union_cover_check(const std::vector<ConvexPoly2>& parents,
                                             const std::vector<ConvexPoly2>& pieces, const AnglePolicy& policy = {});

}  // namespace necklace::planar
