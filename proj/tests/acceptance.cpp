// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "necklace/antoine.hpp"
#include "necklace/certify.hpp"
#include "necklace/cli.hpp"
#include "necklace/planar.hpp"
#include "necklace/shadow.hpp"
#include "oracles.hpp"

using namespace necklace;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;  // seconds, 0 = none
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

geom::SolidTorus unit_seed() {
    return antoine::make_standard_torus(geom::Plane3::from_normal({}, {0, 0, 1}), {}, 1.0, 0.2);
}

const antoine::DefiningSequence& depth3() {
    static const auto seq = antoine::build_necklace_auto(unit_seed(), 3);
    return seq;
}

double min_minor(const std::vector<geom::SolidTorus>& tori) {
    double r = tori.front().minor_radius();
    for (const auto& t : tori) r = std::min(r, t.minor_radius());
    return r;
}

// 1 --------------------------------------------------------------------------------
Outcome circle_cover() {
    const auto c = geom::Circle3::make({}, 1.0, {0, 0, 1});
    const auto a = antoine::circle_tube_cover(c, 0.1);
    const auto b = antoine::circle_tube_cover(c, 6.5);
    const long oracle_a = oracles::minimal_cover_n(1.0, 0.1);
    const long oracle_b = oracles::minimal_cover_n(1.0, 6.5);
    const bool ok = a.n == 198 && oracle_a == 198 && a.total_width > 0.0995 && a.total_width < 0.1 && b.n == 3 &&
                    oracle_b == 3 && std::abs(b.total_width - 6.0) <= 1e-12 &&
                    a.tubes.size() == 198 && b.tubes.size() == 3;
    return {ok, "eps=0.1: N=" + std::to_string(a.n) + " width=" + fmt(a.total_width) + "; eps=6.5: N=" +
                    std::to_string(b.n) + " width=" + fmt(b.total_width)};
}

// 2 --------------------------------------------------------------------------------
Outcome chain_legality() {
    const auto parent = unit_seed();
    const auto params = antoine::default_chain_params(0.2);
    const auto chain = antoine::build_simple_chain(parent, params);
    const auto rep = antoine::verify_chain(chain);
    // Independent recount of the linking pattern with the crossing oracle.
    const int q = params.q;
    bool pattern = true;
    double min_sep = 1e300;
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) {
            const auto& a = chain.children[static_cast<std::size_t>(i)];
            const auto& b = chain.children[static_cast<std::size_t>(j)];
            min_sep = std::min(min_sep, geom::torus_separation(a, b));
            const auto est = geom::gauss_linking(a.core(), b.core());
            const int expect = (j - i == 1 || j - i == q - 1) ? 1 : 0;
            pattern = pattern && est.residual < 0.1 && std::abs(est.value) == expect &&
                      std::abs(oracles::crossing_linking_number(a.core(), b.core())) == expect;
        }
    const bool ok = rep.ok() && pattern && min_sep > 0.0 && rep.min_containment_margin > 0.0;
    return {ok, "q=" + std::to_string(q) + " scale=" + fmt(params.child_major_scale) +
                    " min_separation=" + fmt(min_sep) + " containment_margin=" + fmt(rep.min_containment_margin) +
                    " max_link_residual=" + fmt(rep.max_link_residual)};
}

// 3 --------------------------------------------------------------------------------
Outcome nesting_decay() {
    const auto& seq = depth3();
    const auto rep = antoine::verify_necklace(seq);
    bool nested = !rep.nesting_margin.empty();
    std::string margins;
    for (double m : rep.nesting_margin) {
        nested = nested && m > 0.0;
        margins += fmt(m) + " ";
    }
    const bool ok = rep.ok() && nested && rep.lambda < 1.0 && rep.lambda * rep.lambda < 0.5 &&
                    seq.torus_count() == 1 + seq.params[0].q + seq.params[0].q * seq.params[1].q;
    return {ok, "tori=" + std::to_string(seq.torus_count()) + " lambda=" + fmt(rep.lambda) +
                    " lambda^2=" + fmt(rep.lambda * rep.lambda) + " nesting_margins=" + margins};
}

// 4 --------------------------------------------------------------------------------
Outcome connected_shadows() {
    const auto& seq = depth3();
    bool ok = true;
    std::ostringstream os;
    for (int stage = 1; stage <= 3; ++stage) {
        const auto& tori = seq.stages[static_cast<std::size_t>(stage - 1)].tori;
        const double pixel = min_minor(tori) / 4.0;
        int worst = 1;
        for (std::uint64_t k = 0; k < 20; ++k) {
            const auto plane = cli::random_plane(4004, k, {});
            const auto r = shadow::union_shadow(tori, plane, pixel, shadow::RasterMode::Outer);
            const int n = shadow::connected_components(r).count;
            if (n != 1) {
                ok = false;
                worst = n;
            }
        }
        os << "stage " << stage << ": pixel=" << fmt(pixel) << " components=" << (worst == 1 ? "1" : std::to_string(worst))
           << "; ";
    }
    return {ok, os.str()};
}

// 5 --------------------------------------------------------------------------------
Outcome certified_thin() {
    // eps_i = 2/i is absolute, so the construction is scaled until every stage
    // can be thinned inside its parent (see README).
    constexpr double kScale = 0.009;
    const auto seed = antoine::make_standard_torus(geom::Plane3::from_normal({}, {0, 0, 1}), {}, kScale, 0.2 * kScale);
    auto seq = antoine::build_necklace_auto(seed, 3);
    std::vector<certify::PlankCertificate> certs;
    bool ok = true;
    std::ostringstream os;
    for (int i = 1; i <= 3; ++i) {
        auto res = antoine::thin_to_tubes(seq, i, 2.0 / i);
        seq = std::move(res.sequence);
        ok = ok && res.check.verdict == certify::Verdict::Valid && std::abs(res.certificate.claimed_eps - 1.0 / i) < 1e-15;
        certs.push_back(res.certificate);
    }
    // Thinning at deeper levels never touches shallower tori, so each
    // certificate still covers its stage of the final sequence.
    for (int i = 1; i <= 3; ++i) {
        const auto& tori = seq.stages[static_cast<std::size_t>(i - 1)].tori;
        const auto& cert = certs[static_cast<std::size_t>(i - 1)];
        const auto recheck = certify::check_certificate(cert, tori);
        const double pixel = min_minor(tori) / 4.0;
        std::vector<geom::Plane3> planes;
        for (std::uint64_t k = 0; k < 20; ++k) planes.push_back(cli::random_plane(5005, k, seed.center()));
        try {
            const auto rep = certify::empirical_cross_check(cert, tori, planes, pixel);
            const bool stage_ok = recheck.verdict == certify::Verdict::Valid &&
                                  rep.max_observed <= 1.0 / i + pixel * kSqrt2;
            ok = ok && stage_ok;
            os << "stage " << i << ": tubes=" << cert.tubes.size() << " width=" << fmt(cert.total_width)
               << " claimed=" << fmt(cert.claimed_eps) << " max_disk=" << fmt(rep.max_observed)
               << " pixel=" << fmt(pixel) << " r=" << fmt(tori.front().minor_radius()) << "; ";
        } catch (const Error& e) {
            ok = false;
            os << "stage " << i << ": " << e.what() << "; ";
        }
    }
    return {ok, os.str()};
}

// 6 --------------------------------------------------------------------------------
Outcome line_intervals() {
    const auto& seq = depth3();
    std::size_t gaps = 0;
    double excess = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto line = cli::random_line(6006, k, {});
        for (const auto& st : seq.stages) {
            const auto lp = shadow::line_projection_interval(st.tori, line, 64, 1e-3);
            gaps += lp.gaps.size();
            excess = std::max(excess, lp.max_sample_excess);
        }
    }
    return {gaps == 0 && excess <= 1e-9, "gaps=" + std::to_string(gaps) + " max_sample_excess=" + fmt(excess)};
}

// 7 --------------------------------------------------------------------------------
Outcome shadow_oracles() {
    const auto t = antoine::make_standard_torus(geom::Plane3::from_normal({}, {0, 0, 1}), {}, 2.0, 0.5);
    const double h = 0.01;
    const auto xy = geom::Plane3::plane({}, {1, 0, 0}, {0, 1, 0});
    const auto xz = geom::Plane3::plane({}, {1, 0, 0}, {0, 0, 1});
    const auto annulus = [](const Vec2& p) { return std::abs(norm(p) - 2.0) - 0.5; };
    const auto stadium = [](const Vec2& p) {
        const double x = std::clamp(p.x, -2.0, 2.0);
        return std::hypot(p.x - x, p.y) - 0.5;
    };
    double worst = 0.0;
    bool ok = true;
    for (auto mode : {shadow::RasterMode::Outer, shadow::RasterMode::Inner}) {
        const double e1 = oracles::hausdorff_to_shape(shadow::project_torus(t, xy, h, mode), annulus,
                                                      oracles::annulus_boundary(1.5, 2.5, 20000));
        const double e2 = oracles::hausdorff_to_shape(shadow::project_torus(t, xz, h, mode), stadium,
                                                      oracles::stadium_boundary(2.0, 0.5, 20000));
        worst = std::max({worst, e1, e2});
        ok = ok && e1 <= h * kSqrt2 && e2 <= h * kSqrt2;
    }
    return {ok, "max Hausdorff error=" + fmt(worst) + " bound=" + fmt(h * kSqrt2)};
}

// 8 --------------------------------------------------------------------------------
Outcome plank_bracketing() {
    oracles::Rng rng(8008);
    const double pixel = 0.01;
    double worst_excess = -1e300;
    int violations = 0;
    for (int fam = 0; fam < 100; ++fam) {
        const double eps = rng.uniform(0.1, 0.4);
        const auto tubes = oracles::random_tube_family(rng, eps);
        std::vector<shadow::ShadowItem> items(tubes.begin(), tubes.end());
        for (std::uint64_t k = 0; k < 10; ++k) {
            const auto plane = cli::random_plane(8008 + static_cast<std::uint64_t>(fam), k, {});
            const shadow::Frame frame{{-1.5, -1.5}, pixel, 300, 300};
            const auto r = shadow::union_shadow(items, plane, pixel, shadow::RasterMode::Outer, frame);
            const double radius = shadow::max_inscribed_disk(r).radius;
            worst_excess = std::max(worst_excess, radius - eps);
            if (radius > eps + pixel * kSqrt2) ++violations;
        }
    }
    return {violations == 0, "violations=" + std::to_string(violations) + " max(radius - eps)=" + fmt(worst_excess) +
                                 " allowed=" + fmt(pixel * kSqrt2)};
}

// 9 --------------------------------------------------------------------------------
Outcome planar_exactness() {
    const auto& ifs = planar::shipped_hexagon_ifs();
    bool ok = true;
    std::ostringstream os;
    for (int depth = 0; depth <= 4; ++depth) {
        const auto pieces = planar::planar_level(ifs, depth);
        const auto v = planar::shadow_cover_check(ifs.root, pieces);
        const auto sep = planar::pairwise_separation(pieces);
        const bool disjoint = pieces.size() < 2 || sep.min_distance > 0.0;
        ok = ok && v.covered && v.pieces_inside && disjoint && (depth != 1 || v.exact);
        os << "depth " << depth << ": pieces=" << pieces.size() << " angles=" << v.angles_tested
           << (v.exact ? " exact" : "") << " separation=" << (pieces.size() < 2 ? std::string("n/a") : fmt(sep.min_distance))
           << (v.covered ? "" : " GAP " + v.detail) << "; ";
    }
    return {ok, os.str()};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "circle-cover minimality", 1.0, circle_cover},
        {2, "chain legality", 30.0, chain_legality},
        {3, "necklace nesting and decay", 120.0, nesting_decay},
        {4, "connected shadows", 300.0, connected_shadows},
        {5, "certified thin shadows", 600.0, certified_thin},
        {6, "line-projection intervals", 0.0, line_intervals},
        {7, "shadow oracle agreement", 0.0, shadow_oracles},
        {8, "plank bracketing", 0.0, plank_bracketing},
        {9, "planar exactness", 0.0, planar_exactness},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0.0 && secs > c.time_limit) {
            o.pass = false;
            o.detail += " (over the " + fmt(c.time_limit) + " s limit)";
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << " [" << fmt(secs)
                  << " s]: " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
