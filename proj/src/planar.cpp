#include "necklace/planar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "necklace/io.hpp"
#include "necklace/parallel.hpp"

namespace necklace::planar {

namespace detail {
extern const char* const kHexagonIfsJson;
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAngleMergeTolerance = 1e-13;
// Endpoint discrepancies up to this fraction of the projection scale are
// rounding in the vertex arithmetic, not gaps.
constexpr double kCoverRelativeTolerance = 1e-12;

double signed_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * s;
}

ConvexPoly2 make_ccw(std::vector<Vec2> v) {
    if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
    return ConvexPoly2::make(std::move(v));
}

double normal_angle(const Vec2& d) {
    // Direction perpendicular to d, folded into [0, pi).
    double a = std::atan2(d.x, -d.y);
    if (a < 0.0) a += kPi;
    if (a >= kPi) a -= kPi;
    return a;
}

struct Box {
    double x0, y0, x1, y1;
};

Box bbox(const ConvexPoly2& p) {
    Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& v : p.vertices()) {
        b.x0 = std::min(b.x0, v.x);
        b.y0 = std::min(b.y0, v.y);
        b.x1 = std::max(b.x1, v.x);
        b.y1 = std::max(b.y1, v.y);
    }
    return b;
}

double box_distance(const Box& a, const Box& b) {
    const double dx = std::max({0.0, b.x0 - a.x1, a.x0 - b.x1});
    const double dy = std::max({0.0, b.y0 - a.y1, a.y0 - b.y1});
    return std::hypot(dx, dy);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (a + ab * t));
}

/// Sorted, merged union of intervals.
std::vector<Interval1> merge(std::vector<Interval1> iv) {
    std::sort(iv.begin(), iv.end(), [](const Interval1& a, const Interval1& b) { return a.min < b.min; });
    std::vector<Interval1> out;
    for (const auto& i : iv) {
        if (!out.empty() && i.min <= out.back().max) {
            out.back().max = std::max(out.back().max, i.max);
        } else {
            out.push_back(i);
        }
    }
    return out;
}

struct AngleOutcome {
    bool covered = true;
    double overlap = std::numeric_limits<double>::infinity();
    Interval1 gap;
};

/// Merges the piece intervals and compares the union with the merged target,
/// endpoints agreeing within tol.
AngleOutcome sweep(const std::vector<Interval1>& target, std::vector<Interval1> pieces, double tol) {
    AngleOutcome out;
    std::sort(pieces.begin(), pieces.end(), [](const Interval1& a, const Interval1& b) { return a.min < b.min; });
    std::vector<Interval1> joined;
    for (const auto& i : pieces) {
        if (!joined.empty() && i.min <= joined.back().max + tol) {
            if (i.max > joined.back().max) {
                out.overlap = std::min(out.overlap, joined.back().max - i.min);
                joined.back().max = i.max;
            }
        } else {
            joined.push_back(i);
        }
    }
    auto same = [tol](double a, double b) { return std::abs(a - b) <= tol; };
    for (std::size_t k = 0; k < std::max(joined.size(), target.size()); ++k) {
        if (k < joined.size() && k < target.size() && same(joined[k].min, target[k].min) &&
            same(joined[k].max, target[k].max))
            continue;
        out.covered = false;
        if (k >= joined.size()) {
            out.gap = target[k];
        } else if (k >= target.size()) {
            out.gap = joined[k];
        } else if (!same(joined[k].min, target[k].min)) {
            out.gap = {std::min(joined[k].min, target[k].min), std::max(joined[k].min, target[k].min)};
        } else {
            out.gap = {std::min(joined[k].max, target[k].max), std::max(joined[k].max, target[k].max)};
        }
        return out;
    }
    return out;
}

CoverVerdict run_cover(const std::vector<ConvexPoly2>& parents, const std::vector<ConvexPoly2>& pieces,
                       const AnglePolicy& policy) {
    CoverVerdict v;
    std::vector<ConvexPoly2> all = parents;
    all.insert(all.end(), pieces.begin(), pieces.end());
    const auto angles = cover_angles(parents.front(), all, policy, &v.exact);
    v.angles_tested = angles.size();

    std::vector<AngleOutcome> outcomes(angles.size());
    parallel_for(angles.size(), [&](std::size_t k) {
        std::vector<Interval1> target;
        target.reserve(parents.size());
        for (const auto& p : parents) target.push_back(poly_line_shadow(p, angles[k]));
        std::vector<Interval1> iv;
        iv.reserve(pieces.size());
        for (const auto& p : pieces) iv.push_back(poly_line_shadow(p, angles[k]));
        auto merged = merge(std::move(target));
        const double scale = std::max(std::abs(merged.front().min), std::abs(merged.back().max)) +
                             (merged.back().max - merged.front().min);
        outcomes[k] = sweep(merged, std::move(iv), kCoverRelativeTolerance * scale);
    });
    v.min_overlap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < angles.size(); ++k) {
        v.min_overlap = std::min(v.min_overlap, outcomes[k].overlap);
        if (!outcomes[k].covered && v.covered) {
            v.covered = false;
            v.witness_angle = angles[k];
            v.gap = outcomes[k].gap;
            v.detail = "gap [" + std::to_string(outcomes[k].gap.min) + ", " + std::to_string(outcomes[k].gap.max) +
                       "] at angle " + std::to_string(angles[k]);
        }
    }
    return v;
}

}  // namespace

// --- polygons and maps -----------------------------------------------------------

ConvexPoly2 ConvexPoly2::make(std::vector<Vec2> vertices) {
    const std::size_t n = vertices.size();
    require(n >= 3, ErrorKind::PreconditionViolation, "a polygon needs at least 3 vertices");
    for (const auto& v : vertices)
        require(std::isfinite(v.x) && std::isfinite(v.y), ErrorKind::PreconditionViolation,
                "polygon vertex is not finite");
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        const Vec2& c = vertices[(i + 2) % n];
        require(cross(b - a, c - b) > 0.0, ErrorKind::PreconditionViolation,
                "polygon is not strictly convex and counterclockwise at vertex " + std::to_string((i + 1) % n));
    }
    // Winding once: angles of the edges must turn by exactly 2 pi.
    double turn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = vertices[(i + 1) % n] - vertices[i];
        const Vec2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
        turn += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    require(std::abs(turn - 2.0 * kPi) < 1e-6, ErrorKind::PreconditionViolation, "polygon winds more than once");
    return ConvexPoly2(std::move(vertices));
}

double ConvexPoly2::area() const { return signed_area(v_); }

double ConvexPoly2::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i)
        for (std::size_t j = i + 1; j < v_.size(); ++j) d = std::max(d, norm(v_[i] - v_[j]));
    return d;
}

Vec2 ConvexPoly2::centroid() const {
    Vec2 c;
    for (const auto& v : v_) c = c + v;
    return c / static_cast<double>(v_.size());
}

bool ConvexPoly2::contains(const Vec2& p) const {
    for (std::size_t i = 0; i < v_.size(); ++i)
        if (cross(v_[(i + 1) % v_.size()] - v_[i], p - v_[i]) < 0.0) return false;
    return true;
}

Affine2 Affine2::compose(const Affine2& in) const {
    return {a * in.a + b * in.c, a * in.b + b * in.d, c * in.a + d * in.c,
            c * in.b + d * in.d, a * in.e + b * in.f + e, c * in.e + d * in.f + f};
}

double Affine2::max_singular_value() const {
    const double s = a * a + b * b + c * c + d * d;
    const double det = determinant();
    return std::sqrt(0.5 * (s + std::sqrt(std::max(0.0, s * s - 4.0 * det * det))));
}

ConvexPoly2 Affine2::apply(const ConvexPoly2& p) const {
    std::vector<Vec2> out;
    out.reserve(p.size());
    for (const auto& v : p.vertices()) out.push_back(apply(v));
    if (determinant() < 0.0) std::reverse(out.begin(), out.end());
    return ConvexPoly2::make(std::move(out));
}

PlanarIFS PlanarIFS::make(const ConvexPoly2& root, std::vector<Affine2> maps) {
    require(!maps.empty(), ErrorKind::PreconditionViolation, "an IFS needs at least one map");
    double lambda = 0.0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const auto& m = maps[i];
        require(m.determinant() != 0.0, ErrorKind::PreconditionViolation,
                "map " + std::to_string(i) + " is not injective");
        lambda = std::max(lambda, m.max_singular_value());
        for (const auto& v : root.vertices())
            require(root.contains(m.apply(v)), ErrorKind::PreconditionViolation,
                    "image of the root under map " + std::to_string(i) + " leaves the root");
    }
    require(lambda < 1.0, ErrorKind::PreconditionViolation, "maps are not contractions");
    return PlanarIFS{root, std::move(maps), lambda};
}

Interval1 poly_line_shadow(const ConvexPoly2& p, double angle) {
    const Vec2 d{std::cos(angle), std::sin(angle)};
    Interval1 iv{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& v : p.vertices()) {
        const double t = dot(v, d);
        iv.min = std::min(iv.min, t);
        iv.max = std::max(iv.max, t);
    }
    return iv;
}

// --- cover checks -----------------------------------------------------------------

std::vector<double> cover_angles(const ConvexPoly2& parent, const std::vector<ConvexPoly2>& pieces,
                                 const AnglePolicy& policy, bool* exact) {
    std::vector<double> crit;
    std::size_t total_vertices = parent.size();
    for (const auto& p : pieces) total_vertices += p.size();
    const bool cross = policy.cross_pairs && total_vertices <= policy.cross_pair_vertex_limit;

    if (policy.critical || cross) {
        auto within = [&](const ConvexPoly2& p) {
            const auto& v = p.vertices();
            for (std::size_t i = 0; i < v.size(); ++i)
                for (std::size_t j = i + 1; j < v.size(); ++j) crit.push_back(normal_angle(v[j] - v[i]));
        };
        within(parent);
        for (const auto& p : pieces) within(p);
    }
    if (cross) {
        std::vector<Vec2> all(parent.vertices());
        for (const auto& p : pieces) all.insert(all.end(), p.vertices().begin(), p.vertices().end());
        std::sort(all.begin(), all.end(), [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
        all.erase(std::unique(all.begin(), all.end()), all.end());
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j) crit.push_back(normal_angle(all[j] - all[i]));
    }
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end(),
                           [](double a, double b) { return std::abs(a - b) <= kAngleMergeTolerance; }),
               crit.end());

    std::vector<double> angles = crit;
    if (cross && !crit.empty()) {
        for (std::size_t i = 0; i < crit.size(); ++i) {
            const double a = crit[i];
            const double b = i + 1 < crit.size() ? crit[i + 1] : crit.front() + kPi;
            double m = 0.5 * (a + b);
            if (m >= kPi) m -= kPi;
            angles.push_back(m);
        }
    }
    if (policy.grid_degrees > 0.0) {
        const int n = static_cast<int>(std::ceil(180.0 / policy.grid_degrees - 1e-9));
        for (int k = 0; k < n; ++k) angles.push_back(k * policy.grid_degrees * kPi / 180.0);
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    if (exact) *exact = cross;
    return angles;
}

CoverVerdict shadow_cover_check(const ConvexPoly2& parent, const std::vector<ConvexPoly2>& pieces,
                                const AnglePolicy& policy) {
    CoverVerdict v = union_cover_check({parent}, pieces, policy);
    for (std::size_t i = 0; i < pieces.size() && v.pieces_inside; ++i)
        for (const auto& p : pieces[i].vertices())
            if (!parent.contains(p)) {
                v.pieces_inside = false;
                if (v.detail.empty()) v.detail = "piece " + std::to_string(i) + " leaves the parent";
                break;
            }
    return v;
}

CoverVerdict union_cover_check(const std::vector<ConvexPoly2>& parents, const std::vector<ConvexPoly2>& pieces,
                               const AnglePolicy& policy) {
    require(!parents.empty(), ErrorKind::PreconditionViolation, "cover check needs a parent");
    if (pieces.empty()) {
        CoverVerdict v;
        v.covered = false;
        v.witness_angle = 0.0;
        v.gap = poly_line_shadow(parents.front(), 0.0);
        v.detail = "no pieces";
        return v;
    }
    return run_cover(parents, pieces, policy);
}

// --- Cantor levels -----------------------------------------------------------------

std::vector<ConvexPoly2> planar_level(const PlanarIFS& ifs, int depth) {
    require(depth >= 0, ErrorKind::PreconditionViolation, "depth must be >= 0");
    std::vector<ConvexPoly2> level{ifs.root};
    for (int k = 0; k < depth; ++k) {
        std::vector<ConvexPoly2> next;
        next.reserve(level.size() * ifs.maps.size());
        for (const auto& m : ifs.maps)
            for (const auto& p : level) next.push_back(m.apply(p));
        level = std::move(next);
    }
    return level;
}

std::vector<ConvexPoly2> build_planar_cantor(const PlanarIFS& ifs, int depth, const AnglePolicy& policy) {
    require(depth >= 0, ErrorKind::PreconditionViolation, "depth must be >= 0");
    std::vector<ConvexPoly2> level{ifs.root};
    for (int k = 1; k <= depth; ++k) {
        std::vector<ConvexPoly2> next;
        next.reserve(level.size() * ifs.maps.size());
        for (const auto& m : ifs.maps)
            for (const auto& p : level) next.push_back(m.apply(p));
        level = std::move(next);
        const auto v = shadow_cover_check(ifs.root, level, policy);
        require(v.covered && v.pieces_inside, ErrorKind::CoverBroken,
                "level " + std::to_string(k) + ": " + v.detail);
    }
    return level;
}

double poly_distance(const ConvexPoly2& a, const ConvexPoly2& b) {
    bool separated = false;
    for (const ConvexPoly2* p : {&a, &b}) {
        const auto& v = p->vertices();
        for (std::size_t i = 0; i < v.size() && !separated; ++i) {
            const Vec2 e = v[(i + 1) % v.size()] - v[i];
            const Vec2 n{e.y, -e.x};
            double amax = -std::numeric_limits<double>::infinity(), amin = -amax;
            double bmax = amax, bmin = amin;
            for (const auto& x : a.vertices()) {
                amax = std::max(amax, dot(x, n));
                amin = std::min(amin, dot(x, n));
            }
            for (const auto& x : b.vertices()) {
                bmax = std::max(bmax, dot(x, n));
                bmin = std::min(bmin, dot(x, n));
            }
            if (bmin > amax || amin > bmax) separated = true;
        }
    }
    if (!separated) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    auto one_way = [&](const ConvexPoly2& p, const ConvexPoly2& q) {
        const auto& w = q.vertices();
        for (const auto& x : p.vertices())
            for (std::size_t i = 0; i < w.size(); ++i) d = std::min(d, point_segment_distance(x, w[i], w[(i + 1) % w.size()]));
    };
    one_way(a, b);
    one_way(b, a);
    return d;
}

Separation pairwise_separation(const std::vector<ConvexPoly2>& pieces) {
    Separation s;
    s.min_distance = std::numeric_limits<double>::infinity();
    const std::size_t n = pieces.size();
    if (n < 2) return s;
    std::vector<Box> boxes(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        boxes[i] = bbox(pieces[i]);
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return boxes[a].x0 < boxes[b].x0; });
    auto consider = [&](std::size_t i, std::size_t j) {
        if (box_distance(boxes[i], boxes[j]) >= s.min_distance) return;
        const double d = poly_distance(pieces[i], pieces[j]);
        if (d < s.min_distance) {
            s.min_distance = d;
            s.first = static_cast<int>(std::min(i, j));
            s.second = static_cast<int>(std::max(i, j));
        }
    };
    for (std::size_t k = 0; k + 1 < n; ++k) consider(order[k], order[k + 1]);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        for (std::size_t l = k + 1; l < n; ++l) {
            const std::size_t j = order[l];
            if (boxes[j].x0 - boxes[i].x1 >= s.min_distance) break;
            consider(i, j);
        }
    }
    return s;
}

ConvexPoly2 integer_hexagon() { return ConvexPoly2::make({{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}); }

const PlanarIFS& shipped_hexagon_ifs() {
    static const PlanarIFS ifs = io::ifs_from_json(nlohmann::json::parse(detail::kHexagonIfsJson));
    return ifs;
}

// --- triangle collars ---------------------------------------------------------------

namespace {

using Bary = std::array<double, 3>;

Bary operator+(const Bary& a, const Bary& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Bary operator-(const Bary& a, const Bary& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Bary operator*(const Bary& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

Bary unit(int i) {
    Bary b{0.0, 0.0, 0.0};
    b[static_cast<std::size_t>(i)] = 1.0;
    return b;
}

/// Affine map from the integer hexagon into barycentric coordinates of a
/// triangle, anchored so the anchor vertex lands exactly.
struct HexFrame {
    Vec2 anchor;  // integer-hexagon vertex
    Bary at;      // its image
    Bary p;       // image of the x unit step
    Bary q;       // image of the y unit step

    [[nodiscard]] Bary map(const Vec2& x) const { return at + p * (x.x - anchor.x) + q * (x.y - anchor.y); }
};

Vec2 to_plane(const Bary& b, const std::array<Vec2, 3>& v) { return v[0] * b[0] + v[1] * b[1] + v[2] * b[2]; }

// Corner hexagons use this fraction of each side; edge hexagons cover the rest.
constexpr double kCornerFraction = 0.2;
constexpr double kEdgeLength = 0.25;
constexpr double kEdgeStarts[] = {0.175, 0.375, 0.575};
// Height of the flattened edge hexagons, as a fraction of the altitude.
constexpr double kEdgeHeight = 0.05 / 0.8660254037844386;
constexpr double kBaryTolerance = 1e-12;

std::vector<HexFrame> collar_frames() {
    std::vector<HexFrame> out;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        const Bary p = (unit(j) - unit(i)) * kCornerFraction;
        const Bary q = (unit(k) - unit(i)) * kCornerFraction;
        out.push_back({{-1.0, -1.0}, unit(i), p, q});
    }
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        const Bary e = unit(j) - unit(i);
        const Bary w = (unit(k) - (unit(i) + unit(j)) * 0.5) * kEdgeHeight;
        for (double t : kEdgeStarts) {
            const Bary a = unit(i) + e * t;
            out.push_back({{0.0, -1.0}, a, e * (0.5 * kEdgeLength) - w, e * (0.5 * kEdgeLength) + w});
        }
    }
    return out;
}

ConvexPoly2 map_poly(const ConvexPoly2& p, const HexFrame& f, const std::array<Vec2, 3>& tri) {
    std::vector<Vec2> v;
    v.reserve(p.size());
    for (const auto& x : p.vertices()) v.push_back(to_plane(f.map(x), tri));
    return make_ccw(std::move(v));
}

}  // namespace

TriangleCantor triangle_union_cantor(const std::vector<ConvexPoly2>& simplices, int depth, const PlanarIFS& ifs,
                                     const AnglePolicy& policy) {
    require(!simplices.empty(), ErrorKind::PreconditionViolation, "no simplices given");
    require(depth >= 0, ErrorKind::PreconditionViolation, "depth must be >= 0");
    const auto hex = integer_hexagon();
    require(ifs.root.vertices() == hex.vertices(), ErrorKind::PreconditionViolation,
            "collars need an IFS rooted at the integer hexagon");
    for (std::size_t s = 0; s < simplices.size(); ++s) {
        require(simplices[s].size() == 3, ErrorKind::PreconditionViolation,
                "simplex " + std::to_string(s) + " is not a triangle");
        require(simplices[s].area() > 0.0, ErrorKind::PreconditionViolation,
                "simplex " + std::to_string(s) + " has zero area");
    }

    TriangleCantor out;
    const auto frames = collar_frames();
    const auto local = planar_level(ifs, depth);
    for (std::size_t s = 0; s < simplices.size(); ++s) {
        const auto& v = simplices[s].vertices();
        const std::array<Vec2, 3> tri{v[0], v[1], v[2]};
        std::vector<ConvexPoly2> ring;
        for (const auto& f : frames) {
            for (const auto& x : hex.vertices()) {
                const Bary b = f.map(x);
                require(*std::min_element(b.begin(), b.end()) >= -kBaryTolerance, ErrorKind::CollarFail,
                        "collar hexagon leaves simplex " + std::to_string(s));
            }
            ring.push_back(map_poly(hex, f, tri));
            out.collar.push_back(ring.back());
            out.owner.push_back(static_cast<int>(s));
            for (const auto& p : local) out.pieces.push_back(map_poly(p, f, tri));
        }
        const auto cv = shadow_cover_check(simplices[s], ring, policy);
        require(cv.covered, ErrorKind::CollarFail, "collar of simplex " + std::to_string(s) + ": " + cv.detail);
    }
    out.verdict = union_cover_check(simplices, out.pieces, policy);
    require(out.verdict.covered, ErrorKind::CollarFail, "pieces: " + out.verdict.detail);
    return out;
}

}  // namespace necklace::planar
