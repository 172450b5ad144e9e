#include "necklace/antoine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "necklace/parallel.hpp"

namespace necklace::antoine {

namespace detail {
extern const char* const kChainDefaultsJson;
}

using geom::kPi;

namespace {

constexpr double kCongruenceTolerance = 1e-9;
constexpr double kPolygonTolerance = 1e-9;
constexpr double kDefaultMatchTolerance = 1e-9;
constexpr double kRethinSlack = 1e-3;

std::string pair_str(std::pair<int, int> p) {
    return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

SolidTorus place_child(const SolidTorus& parent, const ChainParams& p, int k) {
    const auto& core = parent.core();
    const auto [u, v] = geom::orthonormal_basis(core.normal);
    const double theta = 2.0 * kPi * k / p.q;
    const Vec3 radial = u.vec() * std::cos(theta) + v.vec() * std::sin(theta);
    const double R = parent.major_radius();
    const double child_R = p.child_major_scale * R * std::sin(kPi / p.q);
    const Vec3 normal = (k % 2 == 0) ? radial : core.normal.vec();
    return SolidTorus::make(Circle3::make(core.center + radial * R, child_R, normal), p.child_minor_ratio * child_R);
}

/// r_parent - (max over the child's core of its distance to the parent core + r_child).
double core_containment_margin(const SolidTorus& child, const SolidTorus& parent) {
    return parent.minor_radius() - geom::circle_excursion(child.core(), parent.core()) - child.minor_radius();
}

double boundary_containment_margin(const SolidTorus& child, const SolidTorus& parent, const VerifyOptions& o) {
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < o.boundary_major_samples; ++i) {
        const double phi = 2.0 * kPi * i / o.boundary_major_samples;
        for (int j = 0; j < o.boundary_minor_samples; ++j) {
            const double theta = 2.0 * kPi * j / o.boundary_minor_samples;
            const Point3 p = child.surface_point(phi, theta);
            margin = std::min(margin, parent.minor_radius() - geom::point_circle_distance(p, parent.core()));
        }
    }
    return margin;
}

bool adjacent(int i, int j, int q) {
    const int d = std::abs(i - j);
    return d == 1 || d == q - 1;
}

}  // namespace

void ChainParams::validate() const {
    require(q >= 3, ErrorKind::PreconditionViolation, "simple chain needs q >= 3, got " + std::to_string(q));
    require(orientation_pattern != OrientationPattern::Alternating || q % 2 == 0, ErrorKind::PreconditionViolation,
            "alternating orientation needs even q, got " + std::to_string(q));
    require(child_major_scale > 0.0 && std::isfinite(child_major_scale), ErrorKind::PreconditionViolation,
            "child_major_scale must be positive");
    require(child_minor_ratio > 0.0 && child_minor_ratio < 1.0, ErrorKind::PreconditionViolation,
            "child_minor_ratio must lie in (0, 1)");
}

std::string ChainReport::summary() const {
    std::ostringstream os;
    os << "disjoint=" << disjoint << " contained=" << contained << " regular_polygon=" << regular_polygon
       << " linking_pattern=" << linking_pattern << " null_homotopy_proxy=" << null_homotopy_proxy
       << " congruent=" << congruent << " min_separation=" << min_separation
       << " min_containment_margin=" << min_containment_margin << " max_link_residual=" << max_link_residual;
    if (!disjoint) os << " disjoint_violation=" << pair_str(disjoint_violation);
    if (!contained) os << " containment_violation=" << containment_violation;
    if (!regular_polygon) os << " polygon_violation=" << polygon_violation;
    if (!linking_pattern) os << " linking_violation=" << pair_str(linking_violation);
    if (!null_homotopy_proxy) os << " homotopy_violation=" << homotopy_violation;
    return os.str();
}

SolidTorus make_standard_torus(const Plane3& plane, const Point3& center, double R, double r) {
    require(plane.dim() == 2, ErrorKind::PreconditionViolation, "a standard torus needs a 2-plane");
    require(r > 0.0 && R > r, ErrorKind::BadRadii,
            "need R > r > 0, got R=" + std::to_string(R) + " r=" + std::to_string(r));
    const Vec3 offset = center - plane.origin();
    const double scale = std::max({1.0, norm(offset), R});
    require(std::abs(dot(offset, plane.normal().vec())) <= geom::kUnitTolerance * scale, ErrorKind::CenterOffPlane,
            "torus center is not in the plane");
    return SolidTorus::make(Circle3::make(center, R, plane.normal()), r);
}

Chain place_simple_chain(const SolidTorus& parent, const ChainParams& params) {
    params.validate();
    Chain c{parent, {}};
    c.children.reserve(static_cast<std::size_t>(params.q));
    for (int k = 0; k < params.q; ++k) c.children.push_back(place_child(parent, params, k));
    return c;
}

Chain build_simple_chain(const SolidTorus& parent, const ChainParams& params) {
    Chain c = place_simple_chain(parent, params);
    const ChainReport report = verify_chain(c);
    require(report.ok(), ErrorKind::Infeasible, "chain with q=" + std::to_string(params.q) + " fails: " + report.summary());
    return c;
}

ChainReport verify_chain(const Chain& chain, const VerifyOptions& options) {
    ChainReport rep;
    const auto& kids = chain.children;
    const int q = static_cast<int>(kids.size());
    const SolidTorus& parent = chain.parent;
    if (q < 3) {
        // Not a simple chain at all; every flag stays false.
        return rep;
    }

    // Congruence.
    rep.congruent = true;
    for (int k = 1; k < q; ++k) {
        const bool same = std::abs(kids[k].major_radius() - kids[0].major_radius()) <=
                              kCongruenceTolerance * kids[0].major_radius() &&
                          std::abs(kids[k].minor_radius() - kids[0].minor_radius()) <=
                              kCongruenceTolerance * kids[0].minor_radius();
        if (!same) rep.congruent = false;
    }

    // Regular polygon on the parent core, in order.
    {
        const auto& core = parent.core();
        const auto [u, v] = geom::orthonormal_basis(core.normal);
        const double R = core.radius;
        std::vector<double> angle(static_cast<std::size_t>(q));
        rep.regular_polygon = true;
        for (int k = 0; k < q && rep.regular_polygon; ++k) {
            const Vec3 d = kids[k].center() - core.center;
            const double h = dot(d, core.normal.vec());
            const double x = dot(d, u.vec());
            const double y = dot(d, v.vec());
            if (std::abs(h) > kPolygonTolerance * R || std::abs(std::hypot(x, y) - R) > kPolygonTolerance * R) {
                rep.regular_polygon = false;
                rep.polygon_violation = k;
            }
            angle[static_cast<std::size_t>(k)] = std::atan2(y, x);
        }
        const double step = 2.0 * kPi / q;
        double orientation = 0.0;
        for (int k = 0; k < q && rep.regular_polygon; ++k) {
            double delta = angle[static_cast<std::size_t>((k + 1) % q)] - angle[static_cast<std::size_t>(k)];
            delta = std::remainder(delta, 2.0 * kPi);
            if (k == 0) orientation = delta >= 0.0 ? 1.0 : -1.0;
            if (std::abs(delta - orientation * step) > kPolygonTolerance) {
                rep.regular_polygon = false;
                rep.polygon_violation = k;
            }
        }
    }

    // Containment and the null-homotopy ball proxy, per child.
    std::vector<double> contain(static_cast<std::size_t>(q));
    std::vector<double> ball(static_cast<std::size_t>(q));
    parallel_for(static_cast<std::size_t>(q), [&](std::size_t k) {
        const auto& c = kids[k];
        contain[k] = std::min(core_containment_margin(c, parent), boundary_containment_margin(c, parent, options));
        ball[k] = parent.minor_radius() - geom::point_circle_distance(c.center(), parent.core()) - c.major_radius();
    });
    rep.contained = true;
    rep.null_homotopy_proxy = true;
    rep.min_containment_margin = std::numeric_limits<double>::infinity();
    const double required = kContainmentMarginFraction * parent.minor_radius();
    for (int k = 0; k < q; ++k) {
        rep.min_containment_margin = std::min(rep.min_containment_margin, contain[static_cast<std::size_t>(k)]);
        if (rep.contained && !(contain[static_cast<std::size_t>(k)] > required)) {
            rep.contained = false;
            rep.containment_violation = k;
        }
        if (rep.null_homotopy_proxy && !(ball[static_cast<std::size_t>(k)] > 0.0)) {
            rep.null_homotopy_proxy = false;
            rep.homotopy_violation = k;
        }
    }

    // Pairwise separation and linking.
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) pairs.emplace_back(i, j);
    struct PairResult {
        double separation = 0.0;
        bool link_ok = false;
        double residual = 0.0;
    };
    std::vector<PairResult> res(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t n) {
        const auto [i, j] = pairs[n];
        const auto& a = kids[static_cast<std::size_t>(i)];
        const auto& b = kids[static_cast<std::size_t>(j)];
        PairResult& r = res[n];
        // Far pairs: the bounding-sphere gap is already a positive lower bound.
        const double sphere_gap = distance(a.center(), b.center()) - a.major_radius() - b.major_radius() -
                                  a.minor_radius() - b.minor_radius();
        r.separation = sphere_gap > a.diameter() + b.diameter() ? sphere_gap : geom::torus_separation(a, b);
        try {
            const auto est = geom::gauss_linking(a.core(), b.core());
            r.residual = est.residual;
            r.link_ok = std::abs(est.value) == (adjacent(i, j, q) ? 1 : 0);
        } catch (const Error&) {
            r.link_ok = false;
            r.residual = 1.0;
        }
    });
    rep.disjoint = true;
    rep.linking_pattern = true;
    rep.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        rep.min_separation = std::min(rep.min_separation, res[n].separation);
        rep.max_link_residual = std::max(rep.max_link_residual, res[n].residual);
        if (rep.disjoint && !(res[n].separation > 0.0)) {
            rep.disjoint = false;
            rep.disjoint_violation = pairs[n];
        }
        if (rep.linking_pattern && !res[n].link_ok) {
            rep.linking_pattern = false;
            rep.linking_violation = pairs[n];
        }
    }
    return rep;
}

// --- defining sequences ------------------------------------------------------

std::size_t DefiningSequence::torus_count() const {
    std::size_t n = 0;
    for (const auto& s : stages) n += s.tori.size();
    return n;
}

Chain DefiningSequence::chain_at(int level, int index) const {
    require(level >= 1 && level < depth(), ErrorKind::PreconditionViolation,
            "chain level " + std::to_string(level) + " outside [1, " + std::to_string(depth() - 1) + "]");
    const auto& st = stages[static_cast<std::size_t>(level - 1)];
    require(index >= 0 && index < static_cast<int>(st.tori.size()), ErrorKind::PreconditionViolation,
            "chain index out of range");
    Chain c{st.tori[static_cast<std::size_t>(index)], {}};
    const auto& next = stages[static_cast<std::size_t>(level)];
    for (std::size_t k = 0; k < next.tori.size(); ++k)
        if (next.parent[k] == index) c.children.push_back(next.tori[k]);
    return c;
}

void DefiningSequence::recompute_diameters() {
    lambda = 0.0;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        auto& st = stages[i];
        st.max_diameter = 0.0;
        for (const auto& t : st.tori) st.max_diameter = std::max(st.max_diameter, t.diameter());
        if (i > 0 && stages[i - 1].max_diameter > 0.0)
            lambda = std::max(lambda, st.max_diameter / stages[i - 1].max_diameter);
    }
}

namespace {

Stage grow_stage(const Stage& prev, const ChainParams& params, int level) {
    std::vector<std::optional<Chain>> chains(prev.tori.size());
    parallel_for(prev.tori.size(), [&](std::size_t i) {
        try {
            chains[i] = build_simple_chain(prev.tori[i], params);
        } catch (const Error& e) {
            throw Error(e.kind(), "level " + std::to_string(level) + " chain " + std::to_string(i) + ": " + e.what());
        }
    });
    Stage next;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        for (auto& t : chains[i]->children) {
            next.tori.push_back(t);
            next.parent.push_back(static_cast<int>(i));
        }
    }
    return next;
}

Stage seed_stage(const SolidTorus& seed) {
    Stage s;
    s.tori.push_back(seed);
    s.parent.push_back(-1);
    return s;
}

double stage_ratio(const Stage& s) { return s.tori.front().minor_radius() / s.tori.front().major_radius(); }

}  // namespace

DefiningSequence build_necklace(const SolidTorus& seed, const std::vector<ChainParams>& params_per_level, int depth) {
    require(depth >= 1, ErrorKind::PreconditionViolation, "depth must be >= 1");
    require(static_cast<int>(params_per_level.size()) >= depth - 1, ErrorKind::PreconditionViolation,
            "need " + std::to_string(depth - 1) + " chain parameter sets, got " +
                std::to_string(params_per_level.size()));
    DefiningSequence seq;
    seq.stages.push_back(seed_stage(seed));
    for (int level = 1; level < depth; ++level) {
        const auto& p = params_per_level[static_cast<std::size_t>(level - 1)];
        seq.stages.push_back(grow_stage(seq.stages.back(), p, level));
        seq.params.push_back(p);
    }
    seq.recompute_diameters();
    return seq;
}

DefiningSequence build_necklace_auto(const SolidTorus& seed, int depth) {
    require(depth >= 1, ErrorKind::PreconditionViolation, "depth must be >= 1");
    DefiningSequence seq;
    seq.stages.push_back(seed_stage(seed));
    for (int level = 1; level < depth; ++level) {
        const ChainParams p = default_chain_params(stage_ratio(seq.stages.back()));
        seq.stages.push_back(grow_stage(seq.stages.back(), p, level));
        seq.params.push_back(p);
    }
    seq.recompute_diameters();
    return seq;
}

bool NecklaceReport::ok() const {
    const bool chains_ok = std::all_of(chains.begin(), chains.end(), [](const ChainReport& r) { return r.ok(); });
    const bool nested = std::all_of(nesting_margin.begin(), nesting_margin.end(), [](double m) { return m > 0.0; });
    return chains_ok && nested && diameters_decay;
}

NecklaceReport verify_necklace(const DefiningSequence& seq, const VerifyOptions& options) {
    NecklaceReport rep;
    for (int level = 1; level < seq.depth(); ++level) {
        double margin = std::numeric_limits<double>::infinity();
        const auto& st = seq.stages[static_cast<std::size_t>(level - 1)];
        for (std::size_t i = 0; i < st.tori.size(); ++i) {
            rep.chains.push_back(verify_chain(seq.chain_at(level, static_cast<int>(i)), options));
            margin = std::min(margin, rep.chains.back().min_containment_margin);
        }
        rep.nesting_margin.push_back(margin);
    }

    std::vector<double> diam;
    for (const auto& st : seq.stages) {
        double d = 0.0;
        for (const auto& t : st.tori) d = std::max(d, t.diameter());
        diam.push_back(d);
    }
    for (std::size_t i = 1; i < diam.size(); ++i) rep.lambda = std::max(rep.lambda, diam[i] / diam[i - 1]);
    rep.diameters_decay = rep.lambda < 1.0;
    for (std::size_t i = 1; i < diam.size() && rep.diameters_decay; ++i)
        rep.diameters_decay = diam[i] <= diam[0] * std::pow(rep.lambda, static_cast<double>(i)) * (1.0 + 1e-12);
    return rep;
}

// --- chain parameter defaults --------------------------------------------------

namespace {

/// Screens a candidate on representative children; rotational symmetry by two
/// steps makes children 0 and 1 stand for every even and odd child.
std::optional<double> screen_candidate(const SolidTorus& parent, const ChainParams& p, const ChainSearchOptions& o) {
    const int shown = std::min(p.q, 5);
    std::vector<SolidTorus> kids;
    for (int k = 0; k < shown; ++k) kids.push_back(place_child(parent, p, k));
    const double rc = kids[0].minor_radius();
    for (int k = 0; k < 2; ++k)
        if (core_containment_margin(kids[static_cast<std::size_t>(k)], parent) <
            o.min_relative_containment * parent.minor_radius())
            return std::nullopt;

    double sep = std::numeric_limits<double>::infinity();
    const std::pair<int, int> probe[] = {{0, 1}, {1, 2}, {0, 2}, {1, 3}, {0, 3}, {1, 4}};
    for (const auto& [i, j] : probe) {
        if (j >= shown || (i == 0 && j == p.q - 1)) continue;
        sep = std::min(sep, geom::torus_separation(kids[static_cast<std::size_t>(i)], kids[static_cast<std::size_t>(j)]));
        if (sep < o.min_relative_separation * rc) return std::nullopt;
    }
    try {
        if (std::abs(geom::linking_number(kids[0].core(), kids[1].core())) != 1) return std::nullopt;
        if (std::abs(geom::linking_number(kids[1].core(), kids[2].core())) != 1) return std::nullopt;
    } catch (const Error&) {
        return std::nullopt;
    }
    return sep / rc;
}

std::vector<double> minor_ratio_candidates(double parent_ratio) {
    std::vector<double> out{std::min(parent_ratio, 0.25)};
    for (double b : {0.2, 0.1, 0.05})
        if (b < out.front() * (1.0 - 1e-12)) out.push_back(b);
    return out;
}

}  // namespace

ChainParams search_chain_params(double parent_ratio, const ChainSearchOptions& options) {
    require(parent_ratio > 0.0 && parent_ratio < 1.0, ErrorKind::PreconditionViolation,
            "parent ratio must lie in (0, 1)");
    const SolidTorus parent = make_standard_torus(Plane3::from_normal({}, {0, 0, 1}), {}, 1.0, parent_ratio);
    // A child wider than the parent tube cannot fit: R_c > half-chord forces sin(pi/q) < ratio.
    int q_lo = static_cast<int>(std::floor(kPi / parent_ratio));
    q_lo = std::max(4, q_lo + (q_lo % 2));

    for (double beta : minor_ratio_candidates(parent_ratio)) {
        for (int q = q_lo; q <= options.q_max; q += 2) {
            std::optional<std::pair<double, double>> best;  // (score, scale)
            for (int si = 1; si < 20; ++si) {
                const double s = 1.0 + 0.05 * si;
                const ChainParams p{q, s, beta, OrientationPattern::Alternating};
                if (const auto score = screen_candidate(parent, p, options); score && (!best || *score > best->first))
                    best = std::make_pair(*score, s);
            }
            if (!best) continue;
            const ChainParams p{q, best->second, beta, OrientationPattern::Alternating};
            if (verify_chain(place_simple_chain(parent, p)).ok()) return p;
        }
    }
    throw Error(ErrorKind::Infeasible, "no chain parameters for ratio " + std::to_string(parent_ratio) +
                                           " up to q=" + std::to_string(options.q_max));
}

const std::vector<DefaultEntry>& shipped_defaults() {
    static const std::vector<DefaultEntry> table = [] {
        std::vector<DefaultEntry> out;
        const auto doc = nlohmann::json::parse(detail::kChainDefaultsJson);
        for (const auto& e : doc.at("entries")) {
            require(e.at("orientation_pattern").get<std::string>() == "alternating", ErrorKind::ParseError,
                    "unknown orientation pattern in shipped defaults");
            out.push_back({e.at("ratio").get<double>(),
                           ChainParams{e.at("q").get<int>(), e.at("child_major_scale").get<double>(),
                                       e.at("child_minor_ratio").get<double>(), OrientationPattern::Alternating}});
        }
        return out;
    }();
    return table;
}

ChainParams default_chain_params(double parent_ratio) {
    for (const auto& e : shipped_defaults())
        if (std::abs(e.ratio - parent_ratio) <= kDefaultMatchTolerance * e.ratio) return e.params;
    static std::mutex mu;
    static std::vector<DefaultEntry> cache;
    {
        std::lock_guard lock(mu);
        for (const auto& e : cache)
            if (e.ratio == parent_ratio) return e.params;
    }
    const ChainParams p = search_chain_params(parent_ratio);
    std::lock_guard lock(mu);
    cache.push_back({parent_ratio, p});
    return p;
}

// --- thinning ----------------------------------------------------------------

double circle_cover_total_width(double radius, long n) {
    const double s = std::sin(kPi / (2.0 * static_cast<double>(n)));
    return 8.0 * static_cast<double>(n) * radius * s * s;
}

TubeCover circle_tube_cover(const Circle3& circle, double eps) {
    require(eps > 0.0, ErrorKind::PreconditionViolation, "eps must be positive");
    long n = 3;
    if (!(circle_cover_total_width(circle.radius, n) < eps)) {
        // Total width ~ 2 pi^2 R / N; walk from the estimate to the exact minimum.
        n = std::max(3L, static_cast<long>(std::ceil(2.0 * kPi * kPi * circle.radius / eps)));
        while (!(circle_cover_total_width(circle.radius, n) < eps)) ++n;
        while (n > 3 && circle_cover_total_width(circle.radius, n - 1) < eps) --n;
    }
    require(n <= std::numeric_limits<int>::max(), ErrorKind::Degenerate, "tube count overflows");

    TubeCover cover;
    cover.n = static_cast<int>(n);
    const double s = std::sin(kPi / (2.0 * static_cast<double>(n)));
    cover.tube_radius = 4.0 * circle.radius * s * s;
    cover.total_width = circle_cover_total_width(circle.radius, n);
    cover.tubes.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
        const Point3 a = circle.point(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
        const Point3 b = circle.point(2.0 * kPi * static_cast<double>(k + 1) / static_cast<double>(n));
        cover.tubes.push_back(Tube::make(geom::Line3{a, geom::Dir3::from(b - a)}, cover.tube_radius));
    }
    return cover;
}

ThinResult thin_to_tubes(const DefiningSequence& seq, int level, double eps) {
    require(level >= 1 && level <= seq.depth(), ErrorKind::PreconditionViolation,
            "thinning level " + std::to_string(level) + " outside [1, " + std::to_string(seq.depth()) + "]");
    require(eps > 0.0, ErrorKind::PreconditionViolation, "eps must be positive");

    ThinResult out{seq, {}, {}};
    auto& stages = out.sequence.stages;
    auto& target = stages[static_cast<std::size_t>(level - 1)];
    const double budget = eps / static_cast<double>(target.tori.size());

    std::vector<TubeCover> covers(target.tori.size());
    parallel_for(target.tori.size(), [&](std::size_t i) {
        const auto& t = target.tori[i];
        covers[i] = circle_tube_cover(t.core(), budget);
        const double r = std::min(t.minor_radius(), kThinningFraction * covers[i].tube_radius);
        const double scale = level > 1 ? stages[static_cast<std::size_t>(level - 2)]
                                             .tori[static_cast<std::size_t>(target.parent[i])]
                                             .major_radius()
                                       : t.major_radius();
        require(r >= kDegenerateFraction * scale, ErrorKind::Degenerate,
                "stage " + std::to_string(level) + " torus " + std::to_string(i) + " would need minor radius " +
                    std::to_string(r));
        if (r < t.minor_radius()) target.tori[i] = t.with_minor_radius(r);
    });

    // Deeper stages: shrink each chain uniformly until it sits inside its thinned parent.
    for (std::size_t s = static_cast<std::size_t>(level); s < stages.size(); ++s) {
        const auto& parents = stages[s - 1].tori;
        auto& st = stages[s];
        std::vector<double> allowed(parents.size(), std::numeric_limits<double>::infinity());
        std::vector<double> excursion(st.tori.size());
        parallel_for(st.tori.size(), [&](std::size_t k) {
            excursion[k] = geom::circle_excursion(st.tori[k].core(),
                                                  parents[static_cast<std::size_t>(st.parent[k])].core());
        });
        for (std::size_t k = 0; k < st.tori.size(); ++k) {
            const auto& p = parents[static_cast<std::size_t>(st.parent[k])];
            auto& a = allowed[static_cast<std::size_t>(st.parent[k])];
            a = std::min(a, (p.minor_radius() - excursion[k]) * (1.0 - kRethinSlack));
        }
        for (std::size_t k = 0; k < st.tori.size(); ++k) {
            const auto pi = static_cast<std::size_t>(st.parent[k]);
            const double a = allowed[pi];
            if (st.tori[k].minor_radius() <= a) continue;
            require(a >= kDegenerateFraction * parents[pi].major_radius() && a < st.tori[k].major_radius(),
                    ErrorKind::Degenerate,
                    "stage " + std::to_string(s + 1) + " torus " + std::to_string(k) +
                        " no longer fits its thinned parent");
            st.tori[k] = st.tori[k].with_minor_radius(a);
        }
    }
    out.sequence.recompute_diameters();

    // Every chain whose parent or children changed must still be a simple chain.
    for (int l = std::max(1, level - 1); l < out.sequence.depth(); ++l) {
        const auto n = stages[static_cast<std::size_t>(l - 1)].tori.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto rep = verify_chain(out.sequence.chain_at(l, static_cast<int>(i)));
            require(rep.ok(), ErrorKind::Degenerate,
                    "thinned chain at level " + std::to_string(l) + " index " + std::to_string(i) +
                        " fails verification: " + rep.summary());
        }
    }

    auto& cert = out.certificate;
    cert.covered_level = level;
    double min_radius = std::numeric_limits<double>::infinity();
    for (auto& c : covers) {
        min_radius = std::min(min_radius, c.tube_radius);
        for (auto& t : c.tubes) cert.tubes.push_back(t);
    }
    cert.recompute_total();
    cert.claimed_eps = eps / 2.0;
    cert.evidence.sample_spacing = min_radius / 8.0;
    out.check = certify::check_certificate(cert, target.tori);
    cert.evidence.margin = out.check.margin;
    cert.verdict = out.check.verdict;
    return out;
}

std::pair<DefiningSequence, std::vector<certify::PlankCertificate>> build_thinned_necklace(
    const SolidTorus& seed, const std::vector<double>& schedule, int depth) {
    require(depth >= 1, ErrorKind::PreconditionViolation, "depth must be >= 1");
    require(static_cast<int>(schedule.size()) >= depth, ErrorKind::PreconditionViolation,
            "thinning schedule shorter than depth");
    DefiningSequence seq;
    seq.stages.push_back(seed_stage(seed));
    seq.recompute_diameters();
    std::vector<certify::PlankCertificate> certs;
    for (int level = 1; level <= depth; ++level) {
        if (level > 1) {
            const ChainParams p = default_chain_params(stage_ratio(seq.stages.back()));
            seq.stages.push_back(grow_stage(seq.stages.back(), p, level - 1));
            seq.params.push_back(p);
            seq.recompute_diameters();
        }
        auto res = thin_to_tubes(seq, level, schedule[static_cast<std::size_t>(level - 1)]);
        seq = std::move(res.sequence);
        certs.push_back(std::move(res.certificate));
    }
    return {std::move(seq), std::move(certs)};
}

}  // namespace necklace::antoine
