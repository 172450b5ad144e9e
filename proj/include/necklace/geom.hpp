#pragma once

#include <array>
#include <utility>

#include "necklace/errors.hpp"
#include "necklace/vec.hpp"

namespace necklace::geom {

// Comparison tolerances. Every geometric predicate in the library refers to
// one of these rather than an inline literal.
inline constexpr double kUnitTolerance = 1e-12;          // unit norms, orthonormal frames
inline constexpr double kCircleDistanceTolerance = 1e-9;  // circle_distance accuracy / "touching"
inline constexpr double kLinkingResidualTarget = 0.05;    // quadrature stops below this
inline constexpr double kLinkingResidualLimit = 0.1;      // NonConvergent at or above this
inline constexpr long kLinkingMaxSegments = 1L << 20;     // n*n cap for the Gauss double sum
inline constexpr double kPi = 3.14159265358979323846;

/// Unit direction. The only way to obtain one is through normalization, so
/// the unit-norm invariant holds for every instance.
class Dir3 {
public:
    Dir3() = default;  // +z
    static Dir3 from(const Vec3& v);

    [[nodiscard]] const Vec3& vec() const { return v_; }
    operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)
    Dir3 operator-() const { return Dir3(-v_); }

private:
    explicit Dir3(const Vec3& v) : v_(v) {}
    Vec3 v_{0.0, 0.0, 1.0};
};

/// Right-handed orthonormal (u, v) with u x v = n; deterministic in n.
[[nodiscard]] std::pair<Dir3, Dir3> orthonormal_basis(const Dir3& n);

struct Line3 {
    Point3 base;
    Dir3 direction;

    [[nodiscard]] double distance(const Point3& p) const;
    [[nodiscard]] Point3 at(double t) const { return base + direction.vec() * t; }
};

/// Affine 1- or 2-plane: origin plus an orthonormal basis of `dim` directions.
class Plane3 {
public:
    static Plane3 line(const Point3& origin, const Vec3& direction);
    /// Basis vectors must already be orthonormal (within kUnitTolerance).
    static Plane3 plane(const Point3& origin, const Vec3& u, const Vec3& v);
    /// 2-plane through `origin` with the given normal, basis from orthonormal_basis.
    static Plane3 from_normal(const Point3& origin, const Vec3& normal);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const Point3& origin() const { return origin_; }
    [[nodiscard]] const Dir3& basis(int i) const { return basis_[static_cast<std::size_t>(i)]; }
    /// Unit normal of a 2-plane (basis(0) x basis(1)).
    [[nodiscard]] Dir3 normal() const;
    /// Point of the plane with the given in-plane coordinates (y ignored for lines).
    [[nodiscard]] Point3 embed(const Vec2& coords) const;

private:
    Plane3(const Point3& origin, const Dir3& u, const Dir3& v, int dim)
        : origin_(origin), basis_{u, v}, dim_(dim) {}
    Point3 origin_;
    std::array<Dir3, 2> basis_;
    int dim_ = 2;
};

/// Orthogonal projection, returned in the target's coordinates (y = 0 for lines).
[[nodiscard]] Vec2 project(const Point3& point, const Plane3& target);

struct Circle3 {
    Point3 center;
    double radius = 1.0;
    Dir3 normal;

    static Circle3 make(const Point3& center, double radius, const Vec3& normal);
    [[nodiscard]] Point3 point(double phi) const;
    [[nodiscard]] Vec3 tangent(double phi) const;  // d point / d phi
};

/// Exact distance from a point to a circle (closed form in the circle's
/// cylindrical coordinates).
[[nodiscard]] double point_circle_distance(const Point3& p, const Circle3& c);

/// Solid torus of revolution: the closed minor_radius-neighbourhood of its core circle.
class SolidTorus {
public:
    static SolidTorus make(const Circle3& core, double minor_radius);

    [[nodiscard]] const Circle3& core() const { return core_; }
    [[nodiscard]] double major_radius() const { return core_.radius; }
    [[nodiscard]] double minor_radius() const { return minor_; }
    [[nodiscard]] const Point3& center() const { return core_.center; }
    [[nodiscard]] double diameter() const { return 2.0 * (core_.radius + minor_); }
    /// (sqrt(rho^2) - R)^2 + h^2 <= r^2 in core-adapted cylindrical coordinates.
    [[nodiscard]] bool contains(const Point3& p) const;
    /// Surface point: major angle phi along the core, minor angle theta around it.
    [[nodiscard]] Point3 surface_point(double phi, double theta) const;
    [[nodiscard]] SolidTorus with_minor_radius(double r) const { return make(core_, r); }

private:
    SolidTorus(const Circle3& core, double r) : core_(core), minor_(r) {}
    Circle3 core_;
    double minor_ = 0.0;
};

/// t(axis, radius) = { P : d(P, axis) <= radius }.
struct Tube {
    Line3 axis;
    double radius = 0.0;

    static Tube make(const Line3& axis, double radius);
    [[nodiscard]] bool contains(const Point3& p) const { return axis.distance(p) <= radius; }
};

/// Region of a 2-plane within half_width of a line of that plane (coordinates
/// are the plane's own).
struct Strip2 {
    Vec2 point;
    Vec2 direction{1.0, 0.0};  // unit
    double half_width = 0.0;

    [[nodiscard]] double distance_to_axis(const Vec2& p) const;
    [[nodiscard]] bool contains(const Vec2& p) const { return distance_to_axis(p) <= half_width; }
};

/// x -> scale * rotation * x + translation.
class Similarity3 {
public:
    Similarity3() = default;
    static Similarity3 make(double scale, const Mat3& rotation, const Vec3& translation);
    static Similarity3 identity() { return {}; }

    [[nodiscard]] double scale() const { return scale_; }
    [[nodiscard]] const Mat3& rotation() const { return rotation_; }
    [[nodiscard]] const Vec3& translation() const { return translation_; }

    [[nodiscard]] Point3 apply(const Point3& p) const { return rotation_ * p * scale_ + translation_; }
    [[nodiscard]] Dir3 rotate(const Dir3& d) const { return Dir3::from(rotation_ * d.vec()); }
    /// (this o inner)(x) = this(inner(x)).
    [[nodiscard]] Similarity3 compose(const Similarity3& inner) const;

private:
    double scale_ = 1.0;
    Mat3 rotation_{};
    Vec3 translation_{};
};

[[nodiscard]] Point3 apply_similarity(const Similarity3& s, const Point3& p);
[[nodiscard]] Line3 apply_similarity(const Similarity3& s, const Line3& l);
[[nodiscard]] Plane3 apply_similarity(const Similarity3& s, const Plane3& p);
[[nodiscard]] Circle3 apply_similarity(const Similarity3& s, const Circle3& c);
[[nodiscard]] SolidTorus apply_similarity(const Similarity3& s, const SolidTorus& t);
[[nodiscard]] Tube apply_similarity(const Similarity3& s, const Tube& t);

/// Minimum distance between the point sets of two circles.
[[nodiscard]] double circle_distance(const Circle3& a, const Circle3& b);

/// Largest distance from a point of `a` to the circle `b`.
[[nodiscard]] double circle_excursion(const Circle3& a, const Circle3& b);

/// circle_distance(cores) - r_a - r_b. Positive implies the solids are
/// disjoint; the converse does not hold in general.
[[nodiscard]] double torus_separation(const SolidTorus& a, const SolidTorus& b);

struct LinkingEstimate {
    int value = 0;         // nearest integer
    double raw = 0.0;      // quadrature value of the Gauss integral
    double residual = 0.0; // |raw - value|
    long segments = 0;     // n*n evaluations used by the final estimate
};

/// Gauss linking integral by a periodic trapezoid double sum, doubling the
/// per-circle resolution until the integer residual drops below
/// kLinkingResidualTarget (or the segment cap is hit).
/// Throws CirclesIntersect when the circles touch, NonConvergent when the
/// residual stays at or above kLinkingResidualLimit.
[[nodiscard]] LinkingEstimate gauss_linking(const Circle3& a, const Circle3& b);
[[nodiscard]] int linking_number(const Circle3& a, const Circle3& b);

}  // namespace necklace::geom
