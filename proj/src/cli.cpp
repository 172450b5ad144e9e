#include "necklace/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "necklace/certify.hpp"
#include "necklace/io.hpp"
#include "necklace/planar.hpp"
#include "necklace/shadow.hpp"

namespace necklace::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
const std::vector<int> kBoxSizes{1, 2, 4, 8, 16};

std::string path_in(const SceneConfig& c, const std::string& name) { return (fs::path(c.output_dir) / name).string(); }

void ensure_output_dir(const SceneConfig& c) {
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    require(!ec, ErrorKind::PreconditionViolation, "cannot create output directory '" + c.output_dir + "'");
}

void write_json(const SceneConfig& c, const std::string& name, json doc) {
    doc["config_hash"] = c.hash;
    io::write_file(path_in(c, name), doc.dump(2) + "\n");
}

antoine::DefiningSequence load_sequence(const SceneConfig& c) {
    const auto path = path_in(c, "sequence.json");
    return io::sequence_from_json(io::parse_json(io::read_file(path), path));
}

std::optional<certify::PlankCertificate> load_certificate(const SceneConfig& c) {
    const auto path = path_in(c, "certificate.json");
    if (!fs::exists(path)) return std::nullopt;
    return io::certificate_from_json(io::parse_json(io::read_file(path), path));
}

int level_or_depth(std::optional<int> level, int depth) {
    const int l = level.value_or(depth);
    require(l >= 1 && l <= depth, ErrorKind::PreconditionViolation,
            "level " + std::to_string(l) + " outside [1, " + std::to_string(depth) + "]");
    return l;
}

double unit_double(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

Vec3 random_direction(std::uint64_t seed, std::uint64_t k) {
    std::mt19937_64 g(splitmix64(seed ^ splitmix64(k + 0x9e3779b97f4a7c15ULL)));
    const double z = 2.0 * unit_double(g) - 1.0;
    const double phi = 2.0 * geom::kPi * unit_double(g);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

/// Maps library errors to exit codes and prints them.
template <class F>
int guarded(std::ostream& log, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        const bool usage = e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::PreconditionViolation;
        return usage ? kExitUsage : kExitFailed;
    }
}

}  // namespace

geom::SolidTorus SceneConfig::seed() const {
    return antoine::make_standard_torus(geom::Plane3::from_normal(seed_center, seed_normal), seed_center, seed_R,
                                        seed_r);
}

SceneConfig parse_config(const std::string& text, const std::string& base_dir) {
    const json j = io::parse_json(text, "config");
    try {
        require(j.is_object(), ErrorKind::ParseError, "config must be a JSON object");
        static const std::vector<std::string> known{"seed",    "depth",         "params", "schedule",
                                                    "pixel",   "rng_seed",      "random_planes",
                                                    "output_dir", "mesh",       "planar"};
        for (const auto& [key, _] : j.items())
            require(std::find(known.begin(), known.end(), key) != known.end(), ErrorKind::ParseError,
                    "unknown config field '" + key + "'");

        SceneConfig c;
        if (j.contains("seed")) {
            const auto& s = j.at("seed");
            if (s.contains("center")) c.seed_center = io::vec3_from_json(s.at("center"));
            if (s.contains("normal")) c.seed_normal = io::vec3_from_json(s.at("normal"));
            c.seed_R = s.value("R", c.seed_R);
            c.seed_r = s.value("r", c.seed_r);
        }
        c.depth = j.value("depth", 1);
        require(c.depth >= 1, ErrorKind::ParseError, "depth must be >= 1");
        if (j.contains("params")) {
            const auto& p = j.at("params");
            if (p.is_string()) {
                require(p.get<std::string>() == "auto", ErrorKind::ParseError, "params must be \"auto\" or a list");
            } else {
                require(p.is_array(), ErrorKind::ParseError, "params must be \"auto\" or a list");
                for (const auto& e : p) c.params.push_back(io::chain_params_from_json(e));
                require(static_cast<int>(c.params.size()) >= c.depth - 1, ErrorKind::ParseError,
                        "params list shorter than depth - 1");
            }
        }
        if (j.contains("schedule")) {
            c.schedule = j.at("schedule").get<std::vector<double>>();
            require(static_cast<int>(c.schedule.size()) >= c.depth, ErrorKind::ParseError,
                    "schedule shorter than depth");
        } else {
            for (int i = 1; i <= c.depth; ++i) c.schedule.push_back(2.0 / i);
        }
        for (std::size_t i = 0; i < c.schedule.size(); ++i) {
            require(c.schedule[i] > 0.0, ErrorKind::ParseError, "schedule entries must be positive");
            require(i == 0 || c.schedule[i] < c.schedule[i - 1], ErrorKind::ParseError,
                    "schedule must be strictly decreasing");
        }
        c.pixel = j.value("pixel", 0.0);
        require(c.pixel >= 0.0 && std::isfinite(c.pixel), ErrorKind::ParseError, "pixel must be positive");
        require(!j.contains("pixel") || c.pixel > 0.0, ErrorKind::ParseError, "pixel must be positive");
        c.rng_seed = j.value("rng_seed", std::uint64_t{0});
        c.random_planes = j.value("random_planes", 1);
        require(c.random_planes >= 1, ErrorKind::ParseError, "random_planes must be >= 1");
        c.output_dir = (fs::path(base_dir) / j.value("output_dir", std::string("out"))).lexically_normal().string();
        if (j.contains("mesh")) {
            c.mesh_rings = j.at("mesh").value("rings", c.mesh_rings);
            c.mesh_segments = j.at("mesh").value("segments", c.mesh_segments);
        }
        require(c.mesh_rings >= 3 && c.mesh_segments >= 3, ErrorKind::ParseError,
                "mesh tessellation needs rings >= 3 and segments >= 3");
        if (j.contains("planar")) {
            const auto& p = j.at("planar");
            if (p.contains("pattern") && !p.at("pattern").is_null())
                c.planar_pattern = (fs::path(base_dir) / p.at("pattern").get<std::string>()).string();
            c.planar_depth = p.value("depth", c.planar_depth);
            require(c.planar_depth >= 0, ErrorKind::ParseError, "planar depth must be >= 0");
        }
        (void)c.seed();  // radii and plane must make a valid torus
        c.hash = io::hex64(io::fnv1a(j.dump()));
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError) throw;
        throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
    }
}

SceneConfig load_config(const std::string& path) {
    return parse_config(io::read_file(path), fs::path(path).parent_path().string());
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

geom::Plane3 random_plane(std::uint64_t seed, std::uint64_t k, const Point3& origin) {
    return geom::Plane3::from_normal(origin, random_direction(seed, k));
}

geom::Plane3 random_line(std::uint64_t seed, std::uint64_t k, const Point3& origin) {
    return geom::Plane3::line(origin, random_direction(seed, k));
}

// --- commands -------------------------------------------------------------------

int cmd_build(const SceneConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        ensure_output_dir(config);
        const auto seq = config.params.empty() ? antoine::build_necklace_auto(config.seed(), config.depth)
                                               : antoine::build_necklace(config.seed(), config.params, config.depth);
        const auto report = antoine::verify_necklace(seq);
        write_json(config, "sequence.json", io::to_json(seq));

        json chains = json::array();
        std::size_t index = 0;
        for (int level = 1; level < seq.depth(); ++level) {
            const auto n = seq.stages[static_cast<std::size_t>(level - 1)].tori.size();
            for (std::size_t i = 0; i < n; ++i, ++index) {
                json c = io::to_json(report.chains[index]);
                c["level"] = level;
                c["index"] = i;
                chains.push_back(std::move(c));
            }
        }
        write_json(config, "report.json",
                   {{"ok", report.ok()},
                    {"lambda", report.lambda},
                    {"diameters_decay", report.diameters_decay},
                    {"nesting_margin", report.nesting_margin},
                    {"torus_count", seq.torus_count()},
                    {"chains", std::move(chains)}});
        log << "built depth " << seq.depth() << " with " << seq.torus_count() << " tori, lambda " << seq.lambda
            << (report.ok() ? ", all chains verified\n" : ", VERIFICATION FAILED\n");
        return report.ok() ? kExitOk : kExitFailed;
    });
}

int cmd_thin(const SceneConfig& config, std::optional<int> level, std::ostream& log) {
    return guarded(log, [&] {
        const auto seq = load_sequence(config);
        const int l = level_or_depth(level, seq.depth());
        require(l <= static_cast<int>(config.schedule.size()), ErrorKind::PreconditionViolation,
                "no schedule entry for level " + std::to_string(l));
        const auto res = antoine::thin_to_tubes(seq, l, config.schedule[static_cast<std::size_t>(l - 1)]);
        write_json(config, "sequence.json", io::to_json(res.sequence));
        json cert = io::to_json(res.certificate);
        if (!res.check.detail.empty()) cert["detail"] = res.check.detail;
        write_json(config, "certificate.json", std::move(cert));
        log << "thinned level " << l << ": " << res.certificate.tubes.size() << " tubes, total width "
            << res.certificate.total_width << ", claimed_eps " << res.certificate.claimed_eps << ", verdict "
            << certify::to_string(res.certificate.verdict) << '\n';
        return res.certificate.verdict == certify::Verdict::Valid ? kExitOk : kExitFailed;
    });
}

int cmd_shadow(const SceneConfig& config, std::optional<int> level, std::optional<int> random,
               std::optional<std::uint64_t> seed, std::ostream& log) {
    return guarded(log, [&] {
        const auto seq = load_sequence(config);
        const int l = level_or_depth(level, seq.depth());
        const auto& tori = seq.stages[static_cast<std::size_t>(l - 1)].tori;
        double min_r = std::numeric_limits<double>::infinity();
        for (const auto& t : tori) min_r = std::min(min_r, t.minor_radius());
        const double pixel = config.pixel > 0.0 ? config.pixel : min_r / 4.0;
        const int count = random.value_or(config.random_planes);
        require(count >= 1, ErrorKind::PreconditionViolation, "--random needs K >= 1");
        const std::uint64_t s = seed.value_or(config.rng_seed);

        std::optional<certify::PlankCertificate> cert = load_certificate(config);
        if (cert && cert->covered_level != l) cert.reset();

        std::vector<geom::Plane3> planes;
        if (!random && config.random_planes == 1) {
            planes.push_back(geom::Plane3::from_normal(seq.stages[0].tori[0].center(),
                                                       seq.stages[0].tori[0].core().normal.vec()));
        } else {
            for (int k = 0; k < count; ++k)
                planes.push_back(random_plane(s, static_cast<std::uint64_t>(k), seq.stages[0].tori[0].center()));
        }

        bool ok = true;
        json entries = json::array();
        for (std::size_t k = 0; k < planes.size(); ++k) {
            const auto raster = shadow::union_shadow(tori, planes[k], pixel, shadow::RasterMode::Outer);
            {
                std::ofstream out(path_in(config, "shadow_" + std::to_string(k) + ".pgm"), std::ios::binary);
                require(static_cast<bool>(out), ErrorKind::PreconditionViolation, "cannot write PGM");
                shadow::write_pgm(out, raster);
            }
            const auto comps = shadow::connected_components(raster);
            const auto disk = shadow::max_inscribed_disk(raster);
            json e = {{"plane",
                       {{"origin", io::to_json(planes[k].origin())},
                        {"basis0", io::to_json(planes[k].basis(0).vec())},
                        {"basis1", io::to_json(planes[k].basis(1).vec())}}},
                      {"components", comps.count},
                      {"connected", comps.count == 1},
                      {"inscribed_radius", disk.radius},
                      {"inscribed_tolerance", disk.tolerance},
                      {"occupied", raster.occupied()}};
            try {
                const auto fit = shadow::box_counting_dimension(raster, kBoxSizes);
                e["box_count_slope"] = fit.slope;
                e["box_count_residual"] = fit.residual;
            } catch (const Error&) {
                e["box_count_slope"] = nullptr;
            }
            ok = ok && comps.count == 1;
            if (cert) {
                const double bound = cert->claimed_eps + pixel * kSqrt2;
                e["certified_bound"] = bound;
                e["certificate_consistent"] = disk.radius <= bound;
                ok = ok && disk.radius <= bound;
            }
            entries.push_back(std::move(e));
        }
        json metrics = {{"level", l}, {"pixel", pixel}, {"rng_seed", s}, {"planes", std::move(entries)}, {"ok", ok}};
        if (cert) metrics["claimed_eps"] = cert->claimed_eps;
        write_json(config, "metrics.json", std::move(metrics));
        log << "shadowed level " << l << " on " << planes.size() << " plane(s)" << (ok ? "" : ", CHECK FAILED") << '\n';
        return ok ? kExitOk : kExitFailed;
    });
}

int cmd_export_mesh(const SceneConfig& config, std::optional<int> level, std::ostream& log) {
    return guarded(log, [&] {
        const auto seq = load_sequence(config);
        const int l = level_or_depth(level, seq.depth());
        const auto name = "mesh_" + std::to_string(l) + ".obj";
        std::ofstream out(path_in(config, name), std::ios::binary);
        require(static_cast<bool>(out), ErrorKind::PreconditionViolation, "cannot write " + name);
        const auto stats = io::write_obj(out, seq.stages[static_cast<std::size_t>(l - 1)].tori, config.mesh_rings,
                                         config.mesh_segments, "config_hash " + config.hash);
        log << "wrote " << name << ": " << stats.vertices << " vertices, " << stats.faces << " faces\n";
        return kExitOk;
    });
}

int cmd_planar(const SceneConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        ensure_output_dir(config);
        const planar::PlanarIFS ifs =
            config.planar_pattern.empty()
                ? planar::shipped_hexagon_ifs()
                : io::ifs_from_json(io::parse_json(io::read_file(config.planar_pattern), config.planar_pattern));

        json levels = json::array();
        bool ok = true;
        std::vector<planar::ConvexPoly2> pieces{ifs.root};
        const double root_diam = ifs.root.diameter();
        for (int k = 0; k <= config.planar_depth && ok; ++k) {
            if (k > 0) pieces = planar::planar_level(ifs, k);
            const auto verdict = planar::shadow_cover_check(ifs.root, pieces);
            const auto sep = planar::pairwise_separation(pieces);
            double max_diam = 0.0;
            for (const auto& p : pieces) max_diam = std::max(max_diam, p.diameter());
            const bool disjoint = pieces.size() < 2 || sep.min_distance > 0.0;
            json e = {{"level", k},
                      {"pieces", pieces.size()},
                      {"cover", io::to_json(verdict)},
                      {"disjoint", disjoint},
                      {"min_separation", pieces.size() < 2 ? json(nullptr) : json(sep.min_distance)},
                      {"max_diameter", max_diam},
                      {"diameter_bound", root_diam * std::pow(ifs.lambda, k)}};
            ok = verdict.covered && verdict.pieces_inside && disjoint;
            if (!verdict.covered)
                log << "level " << k << " not covered: " << verdict.detail << '\n';
            levels.push_back(std::move(e));
        }
        write_json(config, "planar.json",
                   {{"pattern", io::to_json(ifs)}, {"lambda", ifs.lambda}, {"depth", config.planar_depth},
                    {"covered", ok}, {"levels", std::move(levels)}});

        std::ostringstream svg;
        double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
        for (const auto& v : ifs.root.vertices()) {
            x0 = std::min(x0, v.x), y0 = std::min(y0, v.y), x1 = std::max(x1, v.x), y1 = std::max(y1, v.y);
        }
        const double pad = 0.02 * std::max(x1 - x0, y1 - y0);
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 - pad << ' ' << -(y1 + pad) << ' '
            << (x1 - x0) + 2 * pad << ' ' << (y1 - y0) + 2 * pad << "\">\n";
        svg << "<!-- config_hash " << config.hash << " -->\n";
        auto poly = [&](const planar::ConvexPoly2& p, const char* style) {
            svg << "<polygon points=\"";
            for (const auto& v : p.vertices()) svg << v.x << ',' << -v.y << ' ';
            svg << "\" " << style << "/>\n";
        };
        poly(ifs.root, "fill=\"none\" stroke=\"black\" stroke-width=\"0.005\"");
        for (const auto& p : pieces) poly(p, "fill=\"black\"");
        svg << "</svg>\n";
        io::write_file(path_in(config, "planar.svg"), svg.str());
        log << (ok ? "planar pattern covered at every tested angle\n" : "planar check FAILED\n");
        return ok ? kExitOk : kExitFailed;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Antoine necklace construction, shadows and plank certificates"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<int> level;
    std::optional<int> random;
    std::optional<std::uint64_t> seed;
    auto add_common = [&](CLI::App* sub, bool with_level, bool with_shadow) {
        sub->add_option("--config", config_path, "scene config JSON")->required();
        if (with_level) sub->add_option("--level", level, "stage level (1-based)");
        if (with_shadow) {
            sub->add_option("--random", random, "number of seeded random planes");
            sub->add_option("--seed", seed, "RNG seed overriding the config");
        }
    };
    auto* build = app.add_subcommand("build", "build and verify a necklace");
    auto* thin = app.add_subcommand("thin", "thin a stage and emit a plank certificate");
    auto* shadow_cmd = app.add_subcommand("shadow", "rasterize shadows and measure them");
    auto* mesh = app.add_subcommand("mesh", "export a stage as an OBJ mesh");
    auto* planar_cmd = app.add_subcommand("planar", "check the planar IFS pattern");
    add_common(build, false, false);
    add_common(thin, true, false);
    add_common(shadow_cmd, true, true);
    add_common(mesh, true, false);
    add_common(planar_cmd, false, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    SceneConfig config;
    try {
        config = load_config(config_path);
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (*build) return cmd_build(config, out);
    if (*thin) return cmd_thin(config, level, out);
    if (*shadow_cmd) return cmd_shadow(config, level, random, seed, out);
    if (*mesh) return cmd_export_mesh(config, level, out);
    return cmd_planar(config, out);
}

}  // namespace necklace::cli
