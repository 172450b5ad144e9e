#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "necklace/geom.hpp"

/// Orthogonal shadows of tori and tubes: conservative rasters and the
/// measurements taken on them.
namespace necklace::shadow {

using geom::Plane3;
using geom::SolidTorus;
using geom::Strip2;
using geom::Tube;

/// Largest raster (width x height) any operation will allocate.
inline constexpr std::size_t kMaxRasterPixels = std::size_t{1} << 28;

enum class RasterMode {
    Outer,  // pixel set if it may meet the shadow
    Inner,  // pixel set only if it lies inside the shadow
};

struct Frame {
    Vec2 lower;        // lower-left corner, plane coordinates
    double pixel = 0;  // side length
    int width = 0;
    int height = 0;

    [[nodiscard]] Vec2 center(int i, int j) const {
        return {lower.x + (i + 0.5) * pixel, lower.y + (j + 0.5) * pixel};
    }
};

struct ShadowRaster {
    Plane3 plane = Plane3::from_normal({}, {0, 0, 1});
    Frame frame;
    RasterMode mode = RasterMode::Outer;
    std::vector<std::uint8_t> bits;  // row-major, row j = frame row j (y increasing)

    static ShadowRaster empty(const Plane3& plane, const Frame& frame, RasterMode mode);

    [[nodiscard]] bool at(int i, int j) const {
        return bits[static_cast<std::size_t>(j) * static_cast<std::size_t>(frame.width) + static_cast<std::size_t>(i)] != 0;
    }
    void set(int i, int j) {
        bits[static_cast<std::size_t>(j) * static_cast<std::size_t>(frame.width) + static_cast<std::size_t>(i)] = 1;
    }
    [[nodiscard]] std::size_t occupied() const;
};

struct Disk2 {
    Vec2 center;
    double radius = 0.0;
};

/// Shadow of a tube: a disk when the axis is perpendicular to the plane,
/// otherwise a strip of half-width r around the projected axis.
using TubeShadow = std::variant<Disk2, Strip2>;

using ShadowItem = std::variant<SolidTorus, Tube>;

/// Semi-axes and frame of the ellipse that the torus core projects to.
struct ProjectedEllipse {
    Vec2 center;
    Vec2 major_axis{1.0, 0.0};  // unit
    double a = 0.0;             // semi-major
    double b = 0.0;             // semi-minor (0 when seen edge-on)

    [[nodiscard]] double distance(const Vec2& p) const;
};

[[nodiscard]] ProjectedEllipse project_core(const SolidTorus& t, const Plane3& target);

/// Signed distance (in the plane) from p to the torus shadow. The shadow is
/// exactly the r-neighbourhood of the projected core ellipse.
[[nodiscard]] double torus_shadow_distance(const SolidTorus& t, const ProjectedEllipse& e, const Vec2& p);

/// Bounding box of projected bounding spheres, padded by one pixel.
[[nodiscard]] Frame default_frame(const std::vector<SolidTorus>& tori, const Plane3& target, double pixel);

/// Throws ResolutionTooCoarse when pixel > minor_radius / 4.
[[nodiscard]] ShadowRaster project_torus(const SolidTorus& t, const Plane3& target, double pixel, RasterMode mode,
                                         const std::optional<Frame>& frame = std::nullopt);

[[nodiscard]] TubeShadow project_tube(const Tube& t, const Plane3& target);

/// Pixelwise OR of member shadows. Tubes are unbounded, so a frame is
/// required whenever the list contains one.
[[nodiscard]] ShadowRaster union_shadow(const std::vector<ShadowItem>& items, const Plane3& target, double pixel,
                                        RasterMode mode, const std::optional<Frame>& frame = std::nullopt);
[[nodiscard]] ShadowRaster union_shadow(const std::vector<SolidTorus>& tori, const Plane3& target, double pixel,
                                        RasterMode mode, const std::optional<Frame>& frame = std::nullopt);

struct Components {
    int count = 0;
    std::vector<int> labels;  // -1 for empty pixels
};

/// 4-connected labelling.
[[nodiscard]] Components connected_components(const ShadowRaster& r);

struct InscribedDisk {
    double radius = 0.0;  // (max center-to-empty-center distance) - pixel/2
    Vec2 center;
    double tolerance = 0.0;  // pixel * sqrt(2): bound on the over/under-estimate
};

/// Largest disk in the occupied set via an exact Euclidean distance
/// transform; pixels outside the frame count as empty.
[[nodiscard]] InscribedDisk max_inscribed_disk(const ShadowRaster& r);

struct Interval1 {
    double min = 0.0;
    double max = 0.0;
    [[nodiscard]] double length() const { return max - min; }
};

struct LineProjection {
    Interval1 hull;
    std::vector<Interval1> items;  // per torus, analytic
    std::vector<Interval1> gaps;   // uncovered subintervals longer than the resolution
    double max_sample_excess = 0.0;  // how far samples poke past the analytic extremes
};

/// Projection of tori onto an oriented line (a 1-dimensional Plane3).
[[nodiscard]] LineProjection line_projection_interval(const std::vector<SolidTorus>& items, const Plane3& line,
                                                      int samples_per_torus, double resolution);

struct BoxCountFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of the log-log fit
    std::vector<int> box_sizes;  // pixels
    std::vector<std::size_t> counts;
};

/// Least-squares slope of log N(s) against log(1/s). A heuristic dimension
/// estimate for a finite raster, not a certificate. Throws DegenerateFit for
/// fewer than 4 scales, less than 2 octaves of span, or empty counts.
[[nodiscard]] BoxCountFit box_counting_dimension(const ShadowRaster& r, const std::vector<int>& box_sizes);

/// Binary PGM (P5): 255 occupied, 0 empty; top image row is the highest
/// frame row. Comment lines carry plane origin, basis and frame.
void write_pgm(std::ostream& out, const ShadowRaster& r);
[[nodiscard]] ShadowRaster read_pgm(std::istream& in);

}  // namespace necklace::shadow
