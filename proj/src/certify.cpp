#include "necklace/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "necklace/parallel.hpp"

namespace necklace::certify {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kParallelTolerance = 1e-12;
}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Valid: return "VALID";
        case Verdict::CoverageFail: return "CoverageFail";
        case Verdict::WidthFail: return "WidthFail";
        case Verdict::Unchecked: return "Unchecked";
    }
    return "Unchecked";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "VALID") return Verdict::Valid;
    if (s == "CoverageFail") return Verdict::CoverageFail;
    if (s == "WidthFail") return Verdict::WidthFail;
    if (s == "Unchecked") return Verdict::Unchecked;
    throw Error(ErrorKind::ParseError, "unknown verdict '" + s + "'");
}

void PlankCertificate::recompute_total() {
    total_width = 0.0;
    for (const auto& t : tubes) total_width += 2.0 * t.radius;
}

double width(const Tube& t) { return 2.0 * t.radius; }
double width(const Strip2& s) { return 2.0 * s.half_width; }
double width(const SolidTorus& t) { return 2.0 * t.minor_radius(); }
double width(const Shape& s) {
    return std::visit([](const auto& x) { return width(x); }, s);
}

namespace {

struct ItemCoverage {
    double margin = std::numeric_limits<double>::infinity();
    std::optional<Point3> witness;
};

ItemCoverage cover_torus(const SolidTorus& t, const std::vector<Tube>& tubes, double spacing, double required) {
    const double reach = t.major_radius() + t.minor_radius();
    std::vector<const Tube*> candidates;
    for (const auto& tube : tubes)
        if (tube.axis.distance(t.center()) <= reach + tube.radius) candidates.push_back(&tube);

    ItemCoverage out;
    const auto n = static_cast<long>(std::ceil(2.0 * geom::kPi * t.major_radius() / spacing));
    const auto [u, v] = geom::orthonormal_basis(t.core().normal);
    for (long k = 0; k < n; ++k) {
        const double phi = 2.0 * geom::kPi * static_cast<double>(k) / static_cast<double>(n);
        const Point3 p = t.center() + (u.vec() * std::cos(phi) + v.vec() * std::sin(phi)) * t.major_radius();
        double slack = -std::numeric_limits<double>::infinity();
        for (const Tube* tube : candidates)
            slack = std::max(slack, tube->radius - tube->axis.distance(p) - 0.5 * spacing - t.minor_radius());
        if (slack < out.margin) out.margin = slack;
        if (slack < required && !out.witness) out.witness = p;
    }
    return out;
}

ItemCoverage cover_tube(const Tube& item, const std::vector<Tube>& tubes) {
    ItemCoverage out;
    out.margin = -std::numeric_limits<double>::infinity();
    for (const auto& tube : tubes) {
        const double align = std::abs(dot(item.axis.direction.vec(), tube.axis.direction.vec()));
        if (align < 1.0 - kParallelTolerance) continue;
        const double slack = tube.radius - tube.axis.distance(item.axis.base) - item.radius;
        out.margin = std::max(out.margin, slack);
    }
    if (out.margin < -kParallelTolerance * std::max(1.0, item.radius)) out.witness = item.axis.base;
    return out;
}

}  // namespace

CheckResult check_certificate(const PlankCertificate& c, const std::vector<CoveredItem>& items) {
    CheckResult res;
    res.margin = std::numeric_limits<double>::infinity();
    for (const auto& t : c.tubes) res.total_width += 2.0 * t.radius;

    if (c.tubes.empty()) {
        res.verdict = items.empty() ? Verdict::Valid : Verdict::CoverageFail;
        res.detail = "certificate has no tubes";
        if (res.verdict == Verdict::Valid && !(res.total_width < 2.0 * c.claimed_eps)) res.verdict = Verdict::WidthFail;
        return res;
    }

    double min_radius = std::numeric_limits<double>::infinity();
    for (const auto& t : c.tubes) min_radius = std::min(min_radius, t.radius);
    const double spacing = c.evidence.sample_spacing > 0.0 ? std::min(c.evidence.sample_spacing, min_radius / 8.0)
                                                           : min_radius / 8.0;
    const double required = min_radius / 16.0;

    std::vector<ItemCoverage> per_item(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        if (const auto* t = std::get_if<SolidTorus>(&items[i])) {
            per_item[i] = cover_torus(*t, c.tubes, spacing, required);
        } else {
            per_item[i] = cover_tube(std::get<Tube>(items[i]), c.tubes);
        }
    });
    for (std::size_t i = 0; i < items.size(); ++i) {
        res.margin = std::min(res.margin, per_item[i].margin);
        if (per_item[i].witness && !res.witness) {
            res.witness = per_item[i].witness;
            res.detail = "item " + std::to_string(i) + " not covered";
        }
    }
    if (items.empty()) res.margin = 0.0;

    if (res.witness) {
        res.verdict = Verdict::CoverageFail;
    } else if (!(res.total_width < 2.0 * c.claimed_eps)) {
        res.verdict = Verdict::WidthFail;
        res.detail = "total width " + std::to_string(res.total_width) + " is not < 2 * claimed_eps = " +
                     std::to_string(2.0 * c.claimed_eps);
    } else {
        res.verdict = Verdict::Valid;
    }
    return res;
}

CheckResult check_certificate(const PlankCertificate& c, const std::vector<SolidTorus>& items) {
    return check_certificate(c, std::vector<CoveredItem>(items.begin(), items.end()));
}

CrossCheckReport empirical_cross_check(const PlankCertificate& c, const std::vector<SolidTorus>& items,
                                       const std::vector<geom::Plane3>& planes, double pixel) {
    CrossCheckReport report;
    report.pixel = pixel;
    for (std::size_t k = 0; k < planes.size(); ++k) {
        const auto raster = shadow::union_shadow(items, planes[k], pixel, shadow::RasterMode::Outer);
        const auto disk = shadow::max_inscribed_disk(raster);
        CrossCheckEntry e{disk.radius, c.claimed_eps + pixel * kSqrt2};
        report.planes.push_back(e);
        report.max_observed = std::max(report.max_observed, e.inscribed_radius);
        require(e.inscribed_radius <= e.bound, ErrorKind::Contradiction,
                "plane " + std::to_string(k) + ": inscribed radius " + std::to_string(e.inscribed_radius) +
                    " exceeds certified bound " + std::to_string(e.bound));
    }
    return report;
}

std::vector<Strip2> covering_strips(const std::vector<Tube>& tubes, const geom::Plane3& plane) {
    std::vector<Strip2> out;
    out.reserve(tubes.size());
    for (const auto& t : tubes) {
        const auto s = shadow::project_tube(t, plane);
        if (const auto* d = std::get_if<shadow::Disk2>(&s)) {
            out.push_back(Strip2{d->center, {1.0, 0.0}, d->radius});
        } else {
            out.push_back(std::get<Strip2>(s));
        }
    }
    return out;
}

}  // namespace necklace::certify
