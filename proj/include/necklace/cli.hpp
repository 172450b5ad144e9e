#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "necklace/antoine.hpp"
#include "necklace/geom.hpp"

/// Config-driven commands behind the `necklace` executable. Each command
/// writes into the configured output directory under fixed file names and
/// returns a process exit code: 0 success, 1 a verification or geometric
/// failure, 2 a usage, config or parse error.
namespace necklace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

struct SceneConfig {
    Point3 seed_center{0.0, 0.0, 0.0};
    Vec3 seed_normal{0.0, 0.0, 1.0};
    double seed_R = 1.0;
    double seed_r = 0.2;
    int depth = 1;
    /// Empty means "auto" (default_chain_params for every level).
    std::vector<antoine::ChainParams> params;
    /// eps_i for level i = 1..depth; defaults to 2 / i.
    std::vector<double> schedule;
    /// Raster pixel; 0 picks (min minor radius at the level) / 4.
    double pixel = 0.0;
    std::uint64_t rng_seed = 0;
    int random_planes = 1;
    std::string output_dir = ".";
    int mesh_rings = 32;
    int mesh_segments = 16;
    std::string planar_pattern;  // empty: shipped hexagon pattern
    int planar_depth = 4;
    std::string hash;  // FNV-1a of the canonical config document

    [[nodiscard]] geom::SolidTorus seed() const;
};

/// Validates and fills defaults. Relative paths resolve against base_dir.
/// Throws ParseError describing the offending field.
[[nodiscard]] SceneConfig parse_config(const std::string& text, const std::string& base_dir = ".");
[[nodiscard]] SceneConfig load_config(const std::string& path);

/// splitmix64 step.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

/// Plane through `origin` with a normal uniform on the sphere, drawn from a
/// generator seeded by (seed, k) alone so each plane is reproducible on its own.
[[nodiscard]] geom::Plane3 random_plane(std::uint64_t seed, std::uint64_t k, const Point3& origin);
/// Oriented line through `origin` with a uniform direction.
[[nodiscard]] geom::Plane3 random_line(std::uint64_t seed, std::uint64_t k, const Point3& origin);

int cmd_build(const SceneConfig& config, std::ostream& log);
int cmd_thin(const SceneConfig& config, std::optional<int> level, std::ostream& log);
int cmd_shadow(const SceneConfig& config, std::optional<int> level, std::optional<int> random,
               std::optional<std::uint64_t> seed, std::ostream& log);
int cmd_export_mesh(const SceneConfig& config, std::optional<int> level, std::ostream& log);
int cmd_planar(const SceneConfig& config, std::ostream& log);

/// Full command line: `necklace build|thin|shadow|mesh|planar --config <path>
/// [--level N] [--random K] [--seed S]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace necklace::cli
