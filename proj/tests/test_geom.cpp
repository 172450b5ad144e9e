#include <doctest.h>

#include <cmath>

#include "necklace/geom.hpp"
#include "oracles.hpp"

using namespace necklace;
using namespace necklace::geom;

namespace {

Mat3 random_rotation(oracles::Rng& rng) {
    const Vec3 a = rng.direction();
    Vec3 b = rng.direction();
    b = b - a * dot(a, b);
    b = b / norm(b);
    return Mat3::from_columns(a, b, cross(a, b));
}

// 10^6 samples on a, each measured to b in closed form (height over b's plane
// and radial offset from b's radius).
double brute_circle_distance(const Circle3& a, const Circle3& b, int n) {
    double best = 1e300;
    for (int i = 0; i < n; ++i) {
        const Vec3 d = a.point(2.0 * kPi * i / n) - b.center;
        const double h = dot(d, b.normal.vec());
        const double rho = norm(d - b.normal.vec() * h);
        best = std::min(best, std::hypot(h, rho - b.radius));
    }
    return best;
}

}  // namespace

TEST_CASE("Dir3 normalizes and rejects zero") {
    const auto d = Dir3::from({3, 4, 0});
    CHECK(norm(d.vec()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)Dir3::from({0, 0, 0}), Error);
}

TEST_CASE("orthonormal basis is right handed") {
    oracles::Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        const auto n = Dir3::from(rng.direction());
        const auto [u, v] = orthonormal_basis(n);
        CHECK(std::abs(dot(u.vec(), v.vec())) < 1e-12);
        CHECK(std::abs(dot(u.vec(), n.vec())) < 1e-12);
        CHECK(norm(cross(u.vec(), v.vec()) - n.vec()) < 1e-12);
    }
}

TEST_CASE("project: axis aligned, idempotent, closed form") {
    const auto z0 = Plane3::plane({}, {1, 0, 0}, {0, 1, 0});
    const auto p = project({0, 0, 5}, z0);
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);

    const auto tilted = Plane3::from_normal({0.5, -1, 2}, {1, 1, 1});
    const Point3 in = tilted.embed({0.3, -0.7});
    const auto back = project(in, tilted);
    CHECK(back.x == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(-0.7).epsilon(1e-12));

    // p = v - (v.n) n, solved independently as least squares in the plane basis.
    const auto through0 = Plane3::from_normal({}, {1, 1, 1});
    const Vec3 v{1, 2, 3};
    const Vec3 n = Vec3{1, 1, 1} / std::sqrt(3.0);
    const Vec3 expect = v - n * dot(v, n);
    const Point3 got = through0.embed(project(v, through0));
    CHECK(norm(got - expect) < 1e-12);
}

TEST_CASE("project is 1-Lipschitz") {
    oracles::Rng rng(2);
    for (int k = 0; k < 500; ++k) {
        const auto plane = Plane3::from_normal(rng.point(1), rng.direction());
        const Point3 x = rng.point(5), y = rng.point(5);
        CHECK(norm(project(x, plane) - project(y, plane)) <= distance(x, y) + 1e-12);
    }
}

TEST_CASE("circle_distance examples") {
    const auto a = Circle3::make({}, 1, {0, 0, 1});
    CHECK(circle_distance(a, Circle3::make({0, 0, 1}, 1, {0, 0, 1})) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(circle_distance(a, Circle3::make({}, 3, {0, 0, 1})) == doctest::Approx(2.0).epsilon(1e-9));
    // Linked Hopf pair, disjoint.
    const auto hopf = Circle3::make({1, 0, 0}, 1, {0, 1, 0});
    CHECK(circle_distance(a, hopf) > 0.0);
    // Circles through a common point.
    CHECK(circle_distance(a, Circle3::make({2, 0, 0}, 1, {0, 0, 1})) < 1e-9);
}

TEST_CASE("circle_distance matches brute force on skew pairs") {
    oracles::Rng rng(3);
    for (int k = 0; k < 6; ++k) {
        const auto a = Circle3::make(rng.point(0.5), rng.uniform(0.5, 1.5), rng.direction());
        const auto b = Circle3::make(rng.point(0.5), rng.uniform(0.5, 1.5), rng.direction());
        const double brute = brute_circle_distance(a, b, 1000000);
        const double d = circle_distance(a, b);
        CHECK(d <= brute + 1e-12);
        CHECK(brute - d < 1e-6);
        CHECK(circle_distance(b, a) == doctest::Approx(d).epsilon(1e-9));
    }
}

TEST_CASE("circle_excursion bounds every sample") {
    oracles::Rng rng(4);
    for (int k = 0; k < 20; ++k) {
        const auto a = Circle3::make(rng.point(0.3), rng.uniform(0.1, 0.5), rng.direction());
        const auto b = Circle3::make({}, 1.0, {0, 0, 1});
        double brute = 0.0;
        for (int i = 0; i < 4000; ++i) brute = std::max(brute, point_circle_distance(a.point(2 * kPi * i / 4000), b));
        const double e = circle_excursion(a, b);
        CHECK(e >= brute - 1e-12);
        CHECK(e - brute < 1e-6);
    }
}

TEST_CASE("torus_separation examples") {
    const auto t = SolidTorus::make(Circle3::make({}, 1, {0, 0, 1}), 0.2);
    const auto far = SolidTorus::make(Circle3::make({0, 0, 10}, 1, {0, 0, 1}), 0.2);
    CHECK(torus_separation(t, far) > 0.0);
    CHECK(torus_separation(t, t) == doctest::Approx(-0.4).epsilon(1e-9));
}

TEST_CASE("linking_number examples") {
    const auto a = Circle3::make({}, 1, {0, 0, 1});
    CHECK(std::abs(linking_number(a, Circle3::make({1, 0, 0}, 1, {0, 1, 0}))) == 1);
    CHECK(linking_number(a, Circle3::make({3, 0, 0}, 1, {0, 0, 1})) == 0);
    CHECK_THROWS_AS((void)linking_number(a, Circle3::make({2, 0, 0}, 1, {0, 0, 1})), Error);
}

TEST_CASE("linking_number agrees with the crossing oracle, is symmetric and similarity invariant") {
    oracles::Rng rng(5);
    int checked = 0;
    for (int k = 0; k < 80 && checked < 40; ++k) {
        const auto a = Circle3::make({}, 1.0, rng.direction());
        const auto b = Circle3::make(rng.point(1.2), rng.uniform(0.4, 1.5), rng.direction());
        if (circle_distance(a, b) < 0.05) continue;
        ++checked;
        const int l = linking_number(a, b);
        CHECK(std::abs(l) == std::abs(oracles::crossing_linking_number(a, b)));
        CHECK(linking_number(b, a) == l);
        const auto s = Similarity3::make(rng.uniform(0.2, 3), random_rotation(rng), rng.point(4));
        CHECK(linking_number(apply_similarity(s, a), apply_similarity(s, b)) == l);
    }
    CHECK(checked >= 20);
}

TEST_CASE("similarity examples and distance scaling") {
    const auto t = SolidTorus::make(Circle3::make({}, 2, {0, 0, 1}), 0.5);
    const auto same = apply_similarity(Similarity3::identity(), t);
    CHECK(same.major_radius() == 2.0);
    CHECK(same.minor_radius() == 0.5);
    const auto half = apply_similarity(Similarity3::make(0.5, Mat3::identity(), {}), t);
    CHECK(half.major_radius() == doctest::Approx(1.0));
    CHECK(half.minor_radius() == doctest::Approx(0.25));

    oracles::Rng rng(6);
    const auto s1 = Similarity3::make(1.7, random_rotation(rng), rng.point(2));
    const auto s2 = Similarity3::make(0.4, random_rotation(rng), rng.point(2));
    const auto both = s2.compose(s1);
    for (int k = 0; k < 100; ++k) {
        const Point3 p = rng.point(3), q = rng.point(3);
        CHECK(norm(both.apply(p) - s2.apply(s1.apply(p))) < 1e-10);
        CHECK(distance(s1.apply(p), s1.apply(q)) == doctest::Approx(1.7 * distance(p, q)).epsilon(1e-9));
    }
}

TEST_CASE("torus membership agrees with distance to a discretized core") {
    oracles::Rng rng(7);
    const auto t = SolidTorus::make(Circle3::make({0.2, -0.1, 0.3}, 1.0, rng.direction()), 0.3);
    constexpr int kCore = 20000;
    int agree = 0, total = 0;
    for (int k = 0; k < 2000; ++k) {
        const Point3 p = t.center() + rng.point(1.4);
        double d = 1e300;
        for (int i = 0; i < kCore; ++i) d = std::min(d, distance(p, t.core().point(2 * kPi * i / kCore)));
        // Discretization error of the core is below 1e-7 here; skip points that close to the surface.
        if (std::abs(d - 0.3) < 1e-6) continue;
        ++total;
        agree += t.contains(p) == (d <= 0.3);
    }
    CHECK(agree == total);
}

TEST_CASE("surface points lie on the boundary") {
    const auto t = SolidTorus::make(Circle3::make({1, 2, 3}, 2.0, {1, -1, 0.5}), 0.5);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 8; ++j) {
            const Point3 p = t.surface_point(2 * kPi * i / 16, 2 * kPi * j / 8);
            CHECK(point_circle_distance(p, t.core()) == doctest::Approx(0.5).epsilon(1e-12));
        }
}

TEST_CASE("constructors reject invalid radii") {
    CHECK_THROWS_AS((void)Circle3::make({}, 0.0, {0, 0, 1}), Error);
    CHECK_THROWS_AS((void)SolidTorus::make(Circle3::make({}, 1, {0, 0, 1}), 1.0), Error);
    CHECK_THROWS_AS((void)Tube::make(Line3{{}, Dir3{}}, 0.0), Error);
}
