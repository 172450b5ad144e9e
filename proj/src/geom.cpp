#include "necklace/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace necklace {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::PreconditionViolation: return "PreconditionViolation";
        case ErrorKind::BadRadii: return "BadRadii";
        case ErrorKind::CenterOffPlane: return "CenterOffPlane";
        case ErrorKind::CirclesIntersect: return "CirclesIntersect";
        case ErrorKind::NonConvergent: return "NonConvergent";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
        case ErrorKind::DegenerateFit: return "DegenerateFit";
        case ErrorKind::Contradiction: return "Contradiction";
        case ErrorKind::CoverBroken: return "CoverBroken";
        case ErrorKind::CollarFail: return "CollarFail";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace necklace

namespace necklace::geom {

Dir3 Dir3::from(const Vec3& v) {
    const double n = norm(v);
    require(n > 0.0 && std::isfinite(n), ErrorKind::PreconditionViolation, "zero or non-finite direction");
    // Already unit to rounding: keep the bits so serialization round-trips.
    if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) return Dir3(v);
    return Dir3(v / n);
}

std::pair<Dir3, Dir3> orthonormal_basis(const Dir3& n) {
    const Vec3& nv = n.vec();
    const Vec3 seed = std::abs(nv.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Dir3 u = Dir3::from(seed - nv * dot(seed, nv));
    const Dir3 v = Dir3::from(cross(nv, u.vec()));
    return {u, v};
}

double Line3::distance(const Point3& p) const {
    const Vec3 w = p - base;
    return norm(w - direction.vec() * dot(w, direction.vec()));
}

Plane3 Plane3::line(const Point3& origin, const Vec3& direction) {
    const Dir3 u = Dir3::from(direction);
    return Plane3(origin, u, orthonormal_basis(u).first, 1);
}

Plane3 Plane3::plane(const Point3& origin, const Vec3& u, const Vec3& v) {
    require(std::abs(norm(u) - 1.0) <= kUnitTolerance && std::abs(norm(v) - 1.0) <= kUnitTolerance &&
                std::abs(dot(u, v)) <= kUnitTolerance,
            ErrorKind::PreconditionViolation, "plane basis is not orthonormal");
    return Plane3(origin, Dir3::from(u), Dir3::from(v), 2);
}

Plane3 Plane3::from_normal(const Point3& origin, const Vec3& normal) {
    const auto [u, v] = orthonormal_basis(Dir3::from(normal));
    return Plane3(origin, u, v, 2);
}

Dir3 Plane3::normal() const {
    require(dim_ == 2, ErrorKind::PreconditionViolation, "normal() of a 1-plane");
    return Dir3::from(cross(basis_[0].vec(), basis_[1].vec()));
}

Point3 Plane3::embed(const Vec2& coords) const {
    Point3 p = origin_ + basis_[0].vec() * coords.x;
    if (dim_ == 2) p += basis_[1].vec() * coords.y;
    return p;
}

Vec2 project(const Point3& point, const Plane3& target) {
    const Vec3 w = point - target.origin();
    const double x = dot(w, target.basis(0).vec());
    const double y = target.dim() == 2 ? dot(w, target.basis(1).vec()) : 0.0;
    return {x, y};
}

Circle3 Circle3::make(const Point3& center, double radius, const Vec3& normal) {
    require(radius > 0.0 && std::isfinite(radius), ErrorKind::BadRadii, "circle radius must be positive");
    return Circle3{center, radius, Dir3::from(normal)};
}

Point3 Circle3::point(double phi) const {
    const auto [u, v] = orthonormal_basis(normal);
    return center + (u.vec() * std::cos(phi) + v.vec() * std::sin(phi)) * radius;
}

Vec3 Circle3::tangent(double phi) const {
    const auto [u, v] = orthonormal_basis(normal);
    return (v.vec() * std::cos(phi) - u.vec() * std::sin(phi)) * radius;
}

double point_circle_distance(const Point3& p, const Circle3& c) {
    const Vec3 w = p - c.center;
    const double h = dot(w, c.normal.vec());
    const double rho = norm(w - c.normal.vec() * h);
    return std::hypot(rho - c.radius, h);
}

SolidTorus SolidTorus::make(const Circle3& core, double minor_radius) {
    require(minor_radius > 0.0 && minor_radius < core.radius, ErrorKind::BadRadii,
            "solid torus needs 0 < r < R (r=" + std::to_string(minor_radius) +
                ", R=" + std::to_string(core.radius) + ")");
    return SolidTorus(core, minor_radius);
}

bool SolidTorus::contains(const Point3& p) const {
    const Vec3 w = p - core_.center;
    const double h = dot(w, core_.normal.vec());
    const double rho2 = dot(w, w) - h * h;
    const double d = std::sqrt(std::max(rho2, 0.0)) - core_.radius;
    return d * d + h * h <= minor_ * minor_;
}

Point3 SolidTorus::surface_point(double phi, double theta) const {
    const auto [u, v] = orthonormal_basis(core_.normal);
    const Vec3 radial = u.vec() * std::cos(phi) + v.vec() * std::sin(phi);
    return core_.center + radial * (core_.radius + minor_ * std::cos(theta)) +
           core_.normal.vec() * (minor_ * std::sin(theta));
}

Tube Tube::make(const Line3& axis, double radius) {
    require(radius > 0.0 && std::isfinite(radius), ErrorKind::BadRadii, "tube radius must be positive");
    return Tube{axis, radius};
}

double Strip2::distance_to_axis(const Vec2& p) const { return std::abs(cross(direction, p - point)); }

Similarity3 Similarity3::make(double scale, const Mat3& rotation, const Vec3& translation) {
    require(scale > 0.0 && std::isfinite(scale), ErrorKind::PreconditionViolation, "similarity scale must be > 0");
    const Mat3 gram = rotation.transposed() * rotation;
    for (int i = 0; i < 3; ++i) {
        const Vec3 c = gram.column(i);
        const Vec3 e{i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0};
        require(norm(c - e) <= kUnitTolerance * 10, ErrorKind::PreconditionViolation,
                "similarity rotation is not orthonormal");
    }
    require(std::abs(rotation.determinant() - 1.0) <= kUnitTolerance * 10, ErrorKind::PreconditionViolation,
            "similarity rotation must have determinant +1");
    Similarity3 s;
    s.scale_ = scale;
    s.rotation_ = rotation;
    s.translation_ = translation;
    return s;
}

Similarity3 Similarity3::compose(const Similarity3& inner) const {
    Similarity3 s;
    s.scale_ = scale_ * inner.scale_;
    s.rotation_ = rotation_ * inner.rotation_;
    s.translation_ = rotation_ * inner.translation_ * scale_ + translation_;
    return s;
}

Point3 apply_similarity(const Similarity3& s, const Point3& p) { return s.apply(p); }

Line3 apply_similarity(const Similarity3& s, const Line3& l) { return Line3{s.apply(l.base), s.rotate(l.direction)}; }

Plane3 apply_similarity(const Similarity3& s, const Plane3& p) {
    if (p.dim() == 1) return Plane3::line(s.apply(p.origin()), s.rotate(p.basis(0)).vec());
    return Plane3::plane(s.apply(p.origin()), s.rotate(p.basis(0)).vec(), s.rotate(p.basis(1)).vec());
}

Circle3 apply_similarity(const Similarity3& s, const Circle3& c) {
    return Circle3{s.apply(c.center), c.radius * s.scale(), s.rotate(c.normal)};
}

SolidTorus apply_similarity(const Similarity3& s, const SolidTorus& t) {
    return SolidTorus::make(apply_similarity(s, t.core()), t.minor_radius() * s.scale());
}

Tube apply_similarity(const Similarity3& s, const Tube& t) {
    return Tube{apply_similarity(s, t.axis), t.radius * s.scale()};
}

namespace {

// Extremum over phi of d(a(phi), b): dense seeding, then golden-section
// refinement of every sampled local extremum. `sign` = +1 minimizes, -1 maximizes.
double one_sided_extremum(const Circle3& a, const Circle3& b, double sign) {
    constexpr int kSeeds = 256;
    constexpr double kStep = 2.0 * kPi / kSeeds;
    const auto [u, v] = orthonormal_basis(a.normal);
    const auto g = [&](double phi) {
        return sign *
               point_circle_distance(a.center + (u.vec() * std::cos(phi) + v.vec() * std::sin(phi)) * a.radius, b);
    };
    std::array<double, kSeeds> f{};
    for (int k = 0; k < kSeeds; ++k) f[k] = g(k * kStep);

    double best = *std::min_element(f.begin(), f.end());
    for (int k = 0; k < kSeeds; ++k) {
        const double prev = f[(k + kSeeds - 1) % kSeeds];
        const double next = f[(k + 1) % kSeeds];
        if (f[k] > prev || f[k] > next) continue;
        constexpr double kInvPhi = 0.6180339887498949;
        double lo = (k - 1) * kStep;
        double hi = (k + 1) * kStep;
        double x1 = hi - kInvPhi * (hi - lo);
        double x2 = lo + kInvPhi * (hi - lo);
        double f1 = g(x1);
        double f2 = g(x2);
        while (hi - lo > 1e-14) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - kInvPhi * (hi - lo);
                f1 = g(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + kInvPhi * (hi - lo);
                f2 = g(x2);
            }
        }
        best = std::min({best, f1, f2});
    }
    return sign * best;
}

}  // namespace

double circle_distance(const Circle3& a, const Circle3& b) {
    return std::min(one_sided_extremum(a, b, 1.0), one_sided_extremum(b, a, 1.0));
}

double circle_excursion(const Circle3& a, const Circle3& b) { return one_sided_extremum(a, b, -1.0); }

double torus_separation(const SolidTorus& a, const SolidTorus& b) {
    return circle_distance(a.core(), b.core()) - a.minor_radius() - b.minor_radius();
}

namespace {

double gauss_sum(const std::vector<Point3>& pa, const std::vector<Vec3>& ta, const std::vector<Point3>& pb,
                 const std::vector<Vec3>& tb) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        for (std::size_t j = 0; j < pb.size(); ++j) {
            const Vec3 d = pa[i] - pb[j];
            const double r2 = dot(d, d);
            sum += dot(d, cross(ta[i], tb[j])) / (r2 * std::sqrt(r2));
        }
    }
    const double h = 2.0 * kPi / static_cast<double>(pa.size());
    return sum * h * h / (4.0 * kPi);
}

void sample_circle(const Circle3& c, int n, std::vector<Point3>& pts, std::vector<Vec3>& tans) {
    pts.resize(static_cast<std::size_t>(n));
    tans.resize(static_cast<std::size_t>(n));
    const auto [u, v] = orthonormal_basis(c.normal);
    for (int k = 0; k < n; ++k) {
        const double phi = 2.0 * kPi * k / n;
        const double cs = std::cos(phi);
        const double sn = std::sin(phi);
        pts[static_cast<std::size_t>(k)] = c.center + (u.vec() * cs + v.vec() * sn) * c.radius;
        tans[static_cast<std::size_t>(k)] = (v.vec() * cs - u.vec() * sn) * c.radius;
    }
}

}  // namespace

LinkingEstimate gauss_linking(const Circle3& a, const Circle3& b) {
    const double scale = std::max(a.radius, b.radius);
    require(circle_distance(a, b) > kCircleDistanceTolerance * scale, ErrorKind::CirclesIntersect,
            "linking number of intersecting circles is undefined");

    std::vector<Point3> pa, pb;
    std::vector<Vec3> ta, tb;
    LinkingEstimate est;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int n = 32; static_cast<long>(n) * n <= kLinkingMaxSegments; n *= 2) {
        sample_circle(a, n, pa, ta);
        sample_circle(b, n, pb, tb);
        est.raw = gauss_sum(pa, ta, pb, tb);
        est.value = static_cast<int>(std::lround(est.raw));
        est.residual = std::abs(est.raw - est.value);
        est.segments = static_cast<long>(n) * n;
        const bool settled = std::abs(est.raw - previous) < kLinkingResidualTarget;
        if (est.residual < kLinkingResidualTarget && settled) return est;
        previous = est.raw;
    }
    require(est.residual < kLinkingResidualLimit, ErrorKind::NonConvergent,
            "Gauss integral residual " + std::to_string(est.residual) + " after " +
                std::to_string(est.segments) + " segments");
    return est;
}

int linking_number(const Circle3& a, const Circle3& b) { return gauss_linking(a, b).value; }

}  // namespace necklace::geom
