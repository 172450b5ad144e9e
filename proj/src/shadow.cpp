#include "necklace/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "necklace/parallel.hpp"

namespace necklace::shadow {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
// Relative slack added to every pixel decision; covers rounding in the
// distance evaluation (and the ellipse-to-segment swap when b is tiny).
constexpr double kRelativeSlack = 1e-12;
constexpr int kBandRows = 32;

// Distance from (y0, y1) >= 0 to the ellipse (x/e0)^2 + (y/e1)^2 = 1 with
// e0 >= e1 > 0, by bisection on the Lagrange-multiplier root.
double distance_point_ellipse(double e0, double e1, double y0, double y1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return 0.0;
            const double r0 = (e0 / e1) * (e0 / e1);
            const double n0 = r0 * z0;
            double s0 = z1 - 1.0;
            double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
            double s = 0.0;
            for (int i = 0; i < 1100; ++i) {
                s = 0.5 * (s0 + s1);
                if (s == s0 || s == s1) break;
                const double ratio0 = n0 / (s + r0);
                const double ratio1 = z1 / (s + 1.0);
                g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
                if (g > 0.0) {
                    s0 = s;
                } else if (g < 0.0) {
                    s1 = s;
                } else {
                    break;
                }
            }
            const double x0 = r0 * y0 / (s + r0);
            const double x1 = y1 / (s + 1.0);
            return std::hypot(x0 - y0, x1 - y1);
        }
        return std::abs(y1 - e1);
    }
    const double numer0 = e0 * y0;
    const double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        const double xde0 = numer0 / denom0;
        const double x0 = e0 * xde0;
        const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
        return std::hypot(x0 - y0, x1);
    }
    return std::abs(y0 - e0);
}

struct PixelRange {
    int i0 = 0, i1 = 0, j0 = 0, j1 = 0;  // half-open
    [[nodiscard]] bool empty() const { return i0 >= i1 || j0 >= j1; }
};

PixelRange clip_to_frame(const Frame& f, Vec2 lo, Vec2 hi) {
    PixelRange r;
    r.i0 = std::max(0, static_cast<int>(std::floor((lo.x - f.lower.x) / f.pixel)) - 1);
    r.j0 = std::max(0, static_cast<int>(std::floor((lo.y - f.lower.y) / f.pixel)) - 1);
    r.i1 = std::min(f.width, static_cast<int>(std::ceil((hi.x - f.lower.x) / f.pixel)) + 1);
    r.j1 = std::min(f.height, static_cast<int>(std::ceil((hi.y - f.lower.y) / f.pixel)) + 1);
    return r;
}

// Fills pixels of `range` whose center c satisfies sd(c) <= threshold, where
// sd is 1-Lipschitz. Blocks are accepted or rejected whole when the
// Lipschitz bound decides them.
template <typename SignedDistance>
void fill_region(ShadowRaster& r, PixelRange range, const SignedDistance& sd, double threshold) {
    const Frame& f = r.frame;
    const auto recurse = [&](auto&& self, PixelRange b) -> void {
        if (b.empty()) return;
        const int w = b.i1 - b.i0;
        const int h = b.j1 - b.j0;
        const Vec2 c{f.lower.x + 0.5 * (b.i0 + b.i1) * f.pixel, f.lower.y + 0.5 * (b.j0 + b.j1) * f.pixel};
        const double reach = 0.5 * f.pixel * std::hypot(w - 1, h - 1);
        const double s = sd(c);
        if (s - reach > threshold) return;
        if (s + reach <= threshold) {
            for (int j = b.j0; j < b.j1; ++j)
                for (int i = b.i0; i < b.i1; ++i) r.set(i, j);
            return;
        }
        if (w >= h) {
            const int mid = b.i0 + w / 2;
            self(self, PixelRange{b.i0, mid, b.j0, b.j1});
            self(self, PixelRange{mid, b.i1, b.j0, b.j1});
        } else {
            const int mid = b.j0 + h / 2;
            self(self, PixelRange{b.i0, b.i1, b.j0, mid});
            self(self, PixelRange{b.i0, b.i1, mid, b.j1});
        }
    };
    recurse(recurse, range);
}

double threshold_for(RasterMode mode, double pixel, double scale) {
    const double half_diag = 0.5 * pixel * kSqrt2;
    const double slack = kRelativeSlack * std::max(scale, pixel);
    return mode == RasterMode::Outer ? half_diag + slack : -half_diag - slack;
}

void check_resolution(const SolidTorus& t, double pixel) {
    require(pixel > 0.0, ErrorKind::PreconditionViolation, "pixel must be positive");
    require(pixel <= t.minor_radius() / 4.0, ErrorKind::ResolutionTooCoarse,
            "pixel " + std::to_string(pixel) + " exceeds minor radius / 4 = " +
                std::to_string(t.minor_radius() / 4.0));
}

// Rasterizes one item into r, restricted to rows [row0, row1).
void rasterize_item(ShadowRaster& r, const ShadowItem& item, int row0, int row1) {
    const Frame& f = r.frame;
    if (const auto* t = std::get_if<SolidTorus>(&item)) {
        const ProjectedEllipse e = project_core(*t, r.plane);
        const double reach = t->major_radius() + t->minor_radius();
        PixelRange range = clip_to_frame(f, e.center - Vec2{reach, reach}, e.center + Vec2{reach, reach});
        range.j0 = std::max(range.j0, row0);
        range.j1 = std::min(range.j1, row1);
        const double thr = threshold_for(r.mode, f.pixel, reach);
        fill_region(r, range, [&](const Vec2& p) { return torus_shadow_distance(*t, e, p); }, thr);
        return;
    }
    const auto& tube = std::get<Tube>(item);
    const TubeShadow ts = project_tube(tube, r.plane);
    PixelRange range{0, f.width, std::max(0, row0), std::min(f.height, row1)};
    const double scale = std::max({std::abs(f.lower.x), std::abs(f.lower.y), f.pixel * std::max(f.width, f.height)});
    const double thr = threshold_for(r.mode, f.pixel, scale);
    if (const auto* d = std::get_if<Disk2>(&ts)) {
        fill_region(r, range, [&](const Vec2& p) { return norm(p - d->center) - d->radius; }, thr);
    } else {
        const auto& s = std::get<Strip2>(ts);
        fill_region(r, range, [&](const Vec2& p) { return s.distance_to_axis(p) - s.half_width; }, thr);
    }
}

// 1-D squared distance transform (Felzenszwalb & Huttenlocher).
void edt_1d(const double* f, double* d, int n, int* v, double* z) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (f[v[0]] == kInf) {
            v[0] = q;
            continue;
        }
        double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (f[v[0]] == kInf) {
        for (int q = 0; q < n; ++q) d[q] = kInf;
        return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

ShadowRaster ShadowRaster::empty(const Plane3& plane, const Frame& frame, RasterMode mode) {
    require(frame.pixel > 0.0 && frame.width > 0 && frame.height > 0, ErrorKind::PreconditionViolation,
            "raster frame must have positive pixel and size");
    require(plane.dim() == 2, ErrorKind::PreconditionViolation, "shadow target must be a 2-plane");
    require(static_cast<double>(frame.width) * frame.height <= static_cast<double>(kMaxRasterPixels),
            ErrorKind::PreconditionViolation, "raster frame exceeds the size limit");
    ShadowRaster r;
    r.plane = plane;
    r.frame = frame;
    r.mode = mode;
    r.bits.assign(static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height), 0);
    return r;
}

std::size_t ShadowRaster::occupied() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double ProjectedEllipse::distance(const Vec2& p) const {
    const Vec2 d = p - center;
    const double x = std::abs(dot(d, major_axis));
    const double y = std::abs(cross(major_axis, d));
    if (b >= a * (1.0 - 1e-15)) return std::abs(std::hypot(x, y) - a);
    if (b <= a * 1e-12) return x <= a ? y : std::hypot(x - a, y);
    return distance_point_ellipse(a, b, x, y);
}

ProjectedEllipse project_core(const SolidTorus& t, const Plane3& target) {
    const Vec3 n_plane = target.normal().vec();
    const Vec3 n_core = t.core().normal.vec();
    ProjectedEllipse e;
    e.center = geom::project(t.center(), target);
    e.a = t.major_radius();
    e.b = t.major_radius() * std::abs(dot(n_plane, n_core));
    const Vec3 w = cross(n_plane, n_core);
    const Vec2 w2{dot(w, target.basis(0).vec()), dot(w, target.basis(1).vec())};
    const double len = norm(w2);
    e.major_axis = len > 1e-300 ? w2 / len : Vec2{1.0, 0.0};
    return e;
}

double torus_shadow_distance(const SolidTorus& t, const ProjectedEllipse& e, const Vec2& p) {
    return e.distance(p) - t.minor_radius();
}

Frame default_frame(const std::vector<SolidTorus>& tori, const Plane3& target, double pixel) {
    require(!tori.empty(), ErrorKind::PreconditionViolation, "default frame of an empty item list");
    require(pixel > 0.0, ErrorKind::PreconditionViolation, "pixel must be positive");
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi = -lo;
    for (const auto& t : tori) {
        const Vec2 c = geom::project(t.center(), target);
        const double reach = t.major_radius() + t.minor_radius();
        lo = {std::min(lo.x, c.x - reach), std::min(lo.y, c.y - reach)};
        hi = {std::max(hi.x, c.x + reach), std::max(hi.y, c.y + reach)};
    }
    const double w = std::ceil((hi.x - lo.x) / pixel) + 2.0;
    const double h = std::ceil((hi.y - lo.y) / pixel) + 2.0;
    require(w * h <= static_cast<double>(kMaxRasterPixels), ErrorKind::PreconditionViolation,
            "raster of " + std::to_string(w) + " x " + std::to_string(h) + " pixels exceeds the size limit");
    Frame f;
    f.pixel = pixel;
    f.lower = lo - Vec2{pixel, pixel};
    f.width = static_cast<int>(w);
    f.height = static_cast<int>(h);
    return f;
}

ShadowRaster project_torus(const SolidTorus& t, const Plane3& target, double pixel, RasterMode mode,
                           const std::optional<Frame>& frame) {
    check_resolution(t, pixel);
    ShadowRaster r = ShadowRaster::empty(target, frame.value_or(default_frame({t}, target, pixel)), mode);
    rasterize_item(r, t, 0, r.frame.height);
    return r;
}

TubeShadow project_tube(const Tube& t, const Plane3& target) {
    const Vec3& d = t.axis.direction.vec();
    const Vec2 d2{dot(d, target.basis(0).vec()), dot(d, target.basis(1).vec())};
    const double len = norm(d2);
    const Vec2 base = geom::project(t.axis.base, target);
    if (len <= geom::kUnitTolerance) return Disk2{base, t.radius};
    return Strip2{base, d2 / len, t.radius};
}

ShadowRaster union_shadow(const std::vector<ShadowItem>& items, const Plane3& target, double pixel, RasterMode mode,
                          const std::optional<Frame>& frame) {
    require(!items.empty(), ErrorKind::PreconditionViolation, "union_shadow of an empty list");
    std::vector<SolidTorus> tori;
    bool has_tube = false;
    for (const auto& item : items) {
        if (const auto* t = std::get_if<SolidTorus>(&item)) {
            check_resolution(*t, pixel);
            tori.push_back(*t);
        } else {
            has_tube = true;
        }
    }
    require(!has_tube || frame.has_value(), ErrorKind::PreconditionViolation,
            "tube shadows are unbounded; an explicit frame is required");
    const Frame f = frame ? *frame : default_frame(tori, target, pixel);
    require(std::abs(f.pixel - pixel) <= pixel * 1e-12, ErrorKind::PreconditionViolation,
            "frame pixel differs from requested pixel");
    ShadowRaster r = ShadowRaster::empty(target, f, mode);
    const auto bands = static_cast<std::size_t>((f.height + kBandRows - 1) / kBandRows);
    parallel_for(bands, [&](std::size_t band) {
        const int row0 = static_cast<int>(band) * kBandRows;
        const int row1 = std::min(f.height, row0 + kBandRows);
        for (const auto& item : items) rasterize_item(r, item, row0, row1);
    });
    return r;
}

ShadowRaster union_shadow(const std::vector<SolidTorus>& tori, const Plane3& target, double pixel, RasterMode mode,
                          const std::optional<Frame>& frame) {
    return union_shadow(std::vector<ShadowItem>(tori.begin(), tori.end()), target, pixel, mode, frame);
}

Components connected_components(const ShadowRaster& r) {
    const int w = r.frame.width;
    const int h = r.frame.height;
    Components c;
    c.labels.assign(r.bits.size(), -1);
    std::deque<std::pair<int, int>> queue;
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * w + i;
            if (!r.bits[idx] || c.labels[idx] >= 0) continue;
            const int label = c.count++;
            c.labels[idx] = label;
            queue.emplace_back(i, j);
            while (!queue.empty()) {
                const auto [x, y] = queue.front();
                queue.pop_front();
                constexpr int kDx[4] = {1, -1, 0, 0};
                constexpr int kDy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = x + kDx[k];
                    const int ny = y + kDy[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (!r.bits[nidx] || c.labels[nidx] >= 0) continue;
                    c.labels[nidx] = label;
                    queue.emplace_back(nx, ny);
                }
            }
        }
    }
    return c;
}

InscribedDisk max_inscribed_disk(const ShadowRaster& r) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const int w = r.frame.width + 2;  // one empty pixel of padding on each side
    const int h = r.frame.height + 2;
    std::vector<double> grid(static_cast<std::size_t>(w) * h, 0.0);
    for (int j = 0; j < r.frame.height; ++j)
        for (int i = 0; i < r.frame.width; ++i)
            if (r.at(i, j)) grid[static_cast<std::size_t>(j + 1) * w + (i + 1)] = kInf;

    const int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    for (int i = 0; i < w; ++i) {  // columns
        for (int j = 0; j < h; ++j) f[j] = grid[static_cast<std::size_t>(j) * w + i];
        edt_1d(f.data(), d.data(), h, v.data(), z.data());
        for (int j = 0; j < h; ++j) grid[static_cast<std::size_t>(j) * w + i] = d[j];
    }
    InscribedDisk best;
    best.tolerance = r.frame.pixel * kSqrt2;
    double best_sq = 0.0;
    for (int j = 0; j < h; ++j) {  // rows
        double* row = grid.data() + static_cast<std::size_t>(j) * w;
        edt_1d(row, d.data(), w, v.data(), z.data());
        for (int i = 0; i < w; ++i) {
            if (d[i] > best_sq) {
                best_sq = d[i];
                best.center = r.frame.center(i - 1, j - 1);
            }
        }
    }
    if (best_sq > 0.0) best.radius = std::max(0.0, (std::sqrt(best_sq) - 0.5) * r.frame.pixel);
    return best;
}

LineProjection line_projection_interval(const std::vector<SolidTorus>& items, const Plane3& line,
                                        int samples_per_torus, double resolution) {
    require(!items.empty(), ErrorKind::PreconditionViolation, "line projection of an empty list");
    require(line.dim() == 1, ErrorKind::PreconditionViolation, "line projection target must be a 1-plane");
    const Vec3& u = line.basis(0).vec();
    LineProjection out;
    out.hull = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    const int side = std::max(2, static_cast<int>(std::sqrt(std::max(samples_per_torus, 4))));
    for (const auto& t : items) {
        const double c = geom::project(t.center(), line).x;
        const double nu = dot(t.core().normal.vec(), u);
        const double half = t.major_radius() * std::sqrt(std::max(0.0, 1.0 - nu * nu)) + t.minor_radius();
        const Interval1 iv{c - half, c + half};
        out.items.push_back(iv);
        out.hull.min = std::min(out.hull.min, iv.min);
        out.hull.max = std::max(out.hull.max, iv.max);
        for (int a = 0; a < side; ++a) {
            for (int b = 0; b < side; ++b) {
                const double x = geom::project(t.surface_point(2 * geom::kPi * a / side, 2 * geom::kPi * b / side), line).x;
                out.max_sample_excess = std::max({out.max_sample_excess, x - iv.max, iv.min - x});
            }
        }
    }
    std::vector<Interval1> sorted = out.items;
    std::sort(sorted.begin(), sorted.end(), [](const Interval1& a, const Interval1& b) { return a.min < b.min; });
    double reach = sorted.front().max;
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k].min - reach > resolution) out.gaps.push_back({reach, sorted[k].min});
        reach = std::max(reach, sorted[k].max);
    }
    return out;
}

BoxCountFit box_counting_dimension(const ShadowRaster& r, const std::vector<int>& box_sizes) {
    require(box_sizes.size() >= 4, ErrorKind::DegenerateFit, "box counting needs at least 4 scales");
    const auto [mn, mx] = std::minmax_element(box_sizes.begin(), box_sizes.end());
    require(*mn >= 1 && *mx >= 4 * *mn, ErrorKind::DegenerateFit, "box sizes must span at least two octaves");
    BoxCountFit fit;
    fit.box_sizes = box_sizes;
    std::vector<double> xs, ys;
    for (const int s : box_sizes) {
        const int bw = (r.frame.width + s - 1) / s;
        const int bh = (r.frame.height + s - 1) / s;
        std::vector<std::uint8_t> hit(static_cast<std::size_t>(bw) * bh, 0);
        for (int j = 0; j < r.frame.height; ++j)
            for (int i = 0; i < r.frame.width; ++i)
                if (r.at(i, j)) hit[static_cast<std::size_t>(j / s) * bw + i / s] = 1;
        const auto count = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), std::uint8_t{1}));
        require(count > 0, ErrorKind::DegenerateFit, "empty raster at box size " + std::to_string(s));
        fit.counts.push_back(count);
        xs.push_back(-std::log(s * r.frame.pixel));
        ys.push_back(std::log(static_cast<double>(count)));
    }
    const double n = static_cast<double>(xs.size());
    const double mxv = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double myv = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mxv) * (xs[k] - mxv);
        sxy += (xs[k] - mxv) * (ys[k] - myv);
    }
    require(sxx > 0.0, ErrorKind::DegenerateFit, "box sizes must be distinct");
    fit.slope = sxy / sxx;
    fit.intercept = myv - fit.slope * mxv;
    double ss = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (fit.intercept + fit.slope * xs[k]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

void write_pgm(std::ostream& out, const ShadowRaster& r) {
    const auto& o = r.plane.origin();
    const auto& b0 = r.plane.basis(0).vec();
    const auto& b1 = r.plane.basis(1).vec();
    out << "P5\n" << std::setprecision(17);
    out << "# origin " << o.x << ' ' << o.y << ' ' << o.z << '\n';
    out << "# basis0 " << b0.x << ' ' << b0.y << ' ' << b0.z << '\n';
    out << "# basis1 " << b1.x << ' ' << b1.y << ' ' << b1.z << '\n';
    out << "# frame " << r.frame.lower.x << ' ' << r.frame.lower.y << ' ' << r.frame.pixel << '\n';
    out << "# mode " << (r.mode == RasterMode::Outer ? "outer" : "inner") << '\n';
    out << r.frame.width << ' ' << r.frame.height << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(r.frame.width));
    for (int j = r.frame.height - 1; j >= 0; --j) {
        for (int i = 0; i < r.frame.width; ++i) row[static_cast<std::size_t>(i)] = r.at(i, j) ? char(255) : char(0);
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

ShadowRaster read_pgm(std::istream& in) {
    std::string line;
    require(std::getline(in, line) && line == "P5", ErrorKind::ParseError, "not a binary PGM");
    Vec3 origin{}, b0{1, 0, 0}, b1{0, 1, 0};
    Frame f;
    RasterMode mode = RasterMode::Outer;
    bool have_frame = false;
    while (in.peek() == '#') {
        std::getline(in, line);
        std::istringstream ls(line.substr(1));
        std::string key;
        ls >> key;
        if (key == "origin") ls >> origin.x >> origin.y >> origin.z;
        else if (key == "basis0") ls >> b0.x >> b0.y >> b0.z;
        else if (key == "basis1") ls >> b1.x >> b1.y >> b1.z;
        else if (key == "frame") have_frame = static_cast<bool>(ls >> f.lower.x >> f.lower.y >> f.pixel);
        else if (key == "mode") {
            std::string m;
            ls >> m;
            mode = m == "inner" ? RasterMode::Inner : RasterMode::Outer;
        }
    }
    int maxval = 0;
    require(static_cast<bool>(in >> f.width >> f.height >> maxval) && maxval == 255 && have_frame,
            ErrorKind::ParseError, "malformed PGM header");
    in.get();
    ShadowRaster r = ShadowRaster::empty(geom::Plane3::plane(origin, b0, b1), f, mode);
    std::vector<char> row(static_cast<std::size_t>(f.width));
    for (int j = f.height - 1; j >= 0; --j) {
        require(static_cast<bool>(in.read(row.data(), static_cast<std::streamsize>(row.size()))), ErrorKind::ParseError,
                "truncated PGM data");
        for (int i = 0; i < f.width; ++i)
            if (row[static_cast<std::size_t>(i)] != 0) r.set(i, j);
    }
    return r;
}

}  // namespace necklace::shadow
