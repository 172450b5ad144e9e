#include <doctest.h>

#include <array>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "necklace/cli.hpp"
#include "necklace/io.hpp"
#include "oracles.hpp"

using namespace necklace;
namespace fs = std::filesystem;
using io::json;

namespace {

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("necklace_test_" + tag + "_" + std::to_string(std::rand()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) { return io::read_file(path); }

json read_json(const std::string& path) { return json::parse(slurp(path)); }

void write_config(const TempDir& dir, const json& j) { io::write_file(dir.file("config.json"), j.dump(2)); }

int run_bin(const std::string& args) {
    const std::string cmd = std::string("\"") + NECKLACE_BIN + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "necklace");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

struct ObjMesh {
    std::size_t vertices = 0;
    std::vector<std::array<std::size_t, 3>> faces;
    std::string first_line;
};

ObjMesh parse_obj(const std::string& text) {
    ObjMesh m;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) m.first_line = line, first = false;
        if (line.rfind("v ", 0) == 0) ++m.vertices;
        if (line.rfind("f ", 0) == 0) {
            std::istringstream f(line.substr(2));
            std::array<std::size_t, 3> t{};
            f >> t[0] >> t[1] >> t[2];
            m.faces.push_back(t);
        }
    }
    return m;
}

// Closed oriented 2-manifold: every directed edge appears once and its
// reverse appears once; returns the Euler characteristic V - E + F.
long check_manifold(const ObjMesh& m) {
    std::map<std::pair<std::size_t, std::size_t>, int> directed;
    for (const auto& f : m.faces)
        for (int k = 0; k < 3; ++k) {
            const auto a = f[static_cast<std::size_t>(k)], b = f[static_cast<std::size_t>((k + 1) % 3)];
            REQUIRE(a != b);
            REQUIRE(a >= 1);
            REQUIRE(a <= m.vertices);
            ++directed[{a, b}];
        }
    for (const auto& [e, n] : directed) {
        REQUIRE(n == 1);
        const auto rev = directed.find({e.second, e.first});
        REQUIRE(rev != directed.end());
    }
    const long edges = static_cast<long>(directed.size() / 2);
    return static_cast<long>(m.vertices) - edges + static_cast<long>(m.faces.size());
}

geom::SolidTorus random_torus(oracles::Rng& rng) {
    const double R = rng.uniform(0.1, 3.0);
    return geom::SolidTorus::make(geom::Circle3::make(rng.point(2), R, rng.direction()), R * rng.uniform(0.01, 0.9));
}

}  // namespace

TEST_CASE("torus and tube round trip bit for bit") {
    oracles::Rng rng(41);
    for (int k = 0; k < 200; ++k) {
        const auto t = random_torus(rng);
        const json j = io::to_json(t);
        const auto back = io::torus_from_json(json::parse(j.dump()));
        CHECK(io::to_json(back) == j);
        CHECK(back.major_radius() == t.major_radius());
        CHECK(back.minor_radius() == t.minor_radius());

        const auto tube = geom::Tube::make({rng.point(3), geom::Dir3::from(rng.direction())}, rng.uniform(1e-6, 1));
        const auto tb = io::tube_from_json(json::parse(io::to_json(tube).dump()));
        CHECK(tb.radius == tube.radius);
        CHECK(tb.axis.base.x == tube.axis.base.x);
        CHECK(tb.axis.direction.vec().z == tube.axis.direction.vec().z);
    }
}

TEST_CASE("sequence and certificate round trip") {
    const auto seed = antoine::make_standard_torus(geom::Plane3::from_normal({}, {0, 0, 1}), {}, 0.05, 0.01);
    const auto res = antoine::thin_to_tubes(antoine::build_necklace_auto(seed, 2), 2, 1.0);

    const json sj = io::to_json(res.sequence);
    CHECK(sj.at("format") == "necklace-sequence");
    const auto seq = io::sequence_from_json(json::parse(sj.dump()));
    CHECK(seq.depth() == 2);
    CHECK(seq.torus_count() == res.sequence.torus_count());
    CHECK(seq.lambda == res.sequence.lambda);
    CHECK(io::to_json(seq).dump() == sj.dump());

    const json cj = io::to_json(res.certificate);
    const auto cert = io::certificate_from_json(json::parse(cj.dump()));
    CHECK(cert.verdict == certify::Verdict::Valid);
    CHECK(cert.tubes.size() == res.certificate.tubes.size());
    CHECK(cert.total_width == res.certificate.total_width);
    CHECK(io::to_json(cert).dump() == cj.dump());
}

TEST_CASE("IFS round trip") {
    const auto& ifs = planar::shipped_hexagon_ifs();
    const json j = io::to_json(ifs);
    const auto back = io::ifs_from_json(json::parse(j.dump()));
    CHECK(back.maps.size() == ifs.maps.size());
    CHECK(back.lambda == ifs.lambda);
    CHECK(io::to_json(back) == j);
}

TEST_CASE("readers reject missing fields and wrong formats") {
    auto expect_parse_error = [](auto&& f) {
        try {
            f();
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
        }
    };
    json t = io::to_json(geom::SolidTorus::make(geom::Circle3::make({}, 1, {0, 0, 1}), 0.2));
    t.erase("r");
    expect_parse_error([&] { (void)io::torus_from_json(t); });
    expect_parse_error([&] { (void)io::torus_from_json(json{{"center", {0, 0}}, {"normal", {0, 0, 1}}, {"R", 1}, {"r", 0.1}}); });

    json ifs = io::to_json(planar::shipped_hexagon_ifs());
    ifs["format"] = "necklace-sequence";
    expect_parse_error([&] { (void)io::ifs_from_json(ifs); });
    expect_parse_error([&] { (void)io::sequence_from_json(json{{"format", "plank-certificate"}}); });
    expect_parse_error([&] { (void)io::certificate_from_json(json::object()); });
    expect_parse_error([&] { (void)io::parse_json("{ not json", "text"); });
    expect_parse_error([&] { (void)io::read_file("/nonexistent/necklace/file.json"); });
}

TEST_CASE("fnv1a reference vectors") {
    CHECK(io::hex64(io::fnv1a("")) == "cbf29ce484222325");
    CHECK(io::hex64(io::fnv1a("a")) == "af63dc4c8601ec8c");
    CHECK(io::hex64(io::fnv1a("foobar")) == "85944171f73967e8");
    CHECK(io::hex64(0) == "0000000000000000");
    CHECK(io::hex64(0xffffffffffffffffULL) == "ffffffffffffffff");
}

TEST_CASE("write_obj counts and manifold structure") {
    const auto t = geom::SolidTorus::make(geom::Circle3::make({}, 1, {0, 0, 1}), 0.3);
    std::ostringstream out;
    const auto stats = io::write_obj(out, {t}, 32, 16, "config_hash 0123");
    CHECK(stats.vertices == 512);
    CHECK(stats.faces == 1024);
    const auto mesh = parse_obj(out.str());
    CHECK(mesh.first_line == "# config_hash 0123");
    CHECK(mesh.vertices == 512);
    CHECK(mesh.faces.size() == 1024);
    CHECK(check_manifold(mesh) == 0);

    // Vertices lie on the torus surface.
    std::istringstream in(out.str());
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("v ", 0) == 0) {
            std::istringstream v(line.substr(2));
            Point3 p;
            v >> p.x >> p.y >> p.z;
            CHECK(geom::point_circle_distance(p, t.core()) == doctest::Approx(0.3).epsilon(1e-12));
        }

    std::ostringstream two;
    const auto s2 = io::write_obj(two, {t, t}, 5, 3);
    CHECK(s2.vertices == 30);
    CHECK(check_manifold(parse_obj(two.str())) == 0);

    std::ostringstream bad;
    CHECK_THROWS_AS((void)io::write_obj(bad, {t}, 0, 16), Error);
    CHECK_THROWS_AS((void)io::write_obj(bad, {t}, 32, 2), Error);
}

TEST_CASE("parse_config defaults and errors") {
    const auto c = cli::parse_config("{}", "/tmp/base");
    CHECK(c.depth == 1);
    CHECK(c.schedule == std::vector<double>{2.0});
    CHECK(c.output_dir == "/tmp/base/out");
    CHECK(c.hash == io::hex64(io::fnv1a(json::object().dump())));
    CHECK(c.hash.size() == 16);

    const auto d = cli::parse_config(R"({"depth": 3, "params": "auto"})");
    CHECK(d.schedule == std::vector<double>{2.0, 1.0, 2.0 / 3.0});
    CHECK(d.params.empty());

    auto expect_parse_error = [](const std::string& text) {
        try {
            (void)cli::parse_config(text);
            FAIL("expected ParseError for " << text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
        }
    };
    expect_parse_error(R"({"colour": 1})");
    expect_parse_error(R"({"depth": )");
    expect_parse_error(R"([1, 2])");
    expect_parse_error(R"({"depth": 0})");
    expect_parse_error(R"({"mesh": {"rings": 0}})");
    expect_parse_error(R"({"mesh": {"segments": 2}})");
    expect_parse_error(R"({"depth": 2, "schedule": [1, 1]})");
    expect_parse_error(R"({"depth": 2, "schedule": [1, 2]})");
    expect_parse_error(R"({"depth": 2, "schedule": [1]})");
    expect_parse_error(R"({"schedule": [-1]})");
    expect_parse_error(R"({"params": "manual"})");
    expect_parse_error(R"({"pixel": 0})");
    expect_parse_error(R"({"seed": {"R": 1, "r": 1}})");
    expect_parse_error(R"({"depth": "two"})");
}

TEST_CASE("random planes are reproducible per index") {
    const Point3 o{1, 2, 3};
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto a = cli::random_plane(7, k, o);
        const auto b = cli::random_plane(7, k, o);
        CHECK(a.normal().vec().x == b.normal().vec().x);
        CHECK(a.normal().vec().z == b.normal().vec().z);
        CHECK(norm(a.normal().vec()) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(cli::random_plane(7, 0, o).normal().vec().x != cli::random_plane(8, 0, o).normal().vec().x);
    CHECK(cli::splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("binary: usage and config errors exit 2") {
    CHECK(run_bin("") == 2);
    CHECK(run_bin("frobnicate") == 2);
    CHECK(run_bin("build --config /nonexistent/necklace.json") == 2);
    TempDir dir("badcfg");
    io::write_file(dir.file("config.json"), R"({"depth": 0})");
    CHECK(run_bin("build --config " + dir.file("config.json")) == 2);
    CHECK(run_bin("--help") == 0);
}

TEST_CASE("depth 1 build and identity thin") {
    TempDir dir("depth1");
    write_config(dir, {{"depth", 1}, {"output_dir", "."}});
    const auto cfg = dir.file("config.json");
    REQUIRE(run_cli({"build", "--config", cfg}) == 0);
    const auto seq = io::sequence_from_json(read_json(dir.file("sequence.json")));
    CHECK(seq.torus_count() == 1);
    const auto report = read_json(dir.file("report.json"));
    CHECK(report.at("ok") == true);
    CHECK(report.at("chains").empty());

    REQUIRE(run_cli({"thin", "--config", cfg, "--level", "1"}) == 0);
    const auto cert = read_json(dir.file("certificate.json"));
    CHECK(cert.at("verdict") == "VALID");
    CHECK(cert.at("covered_level") == 1);
    CHECK(cert.at("total_width").get<double>() < 2 * cert.at("claimed_eps").get<double>());

    CHECK(run_cli({"thin", "--config", cfg, "--level", "2"}) == 2);
}

TEST_CASE("small seed depth 2: build, thin, shadow, mesh") {
    TempDir dir("flow");
    write_config(dir, {{"seed", {{"R", 0.05}, {"r", 0.01}}},
                       {"depth", 2},
                       {"schedule", {2.0, 1.0}},
                       {"output_dir", "out"},
                       {"rng_seed", 5},
                       {"mesh", {{"rings", 12}, {"segments", 6}}}});
    const auto cfg = dir.file("config.json");
    const auto out = [&](const std::string& n) { return (dir.path / "out" / n).string(); };
    REQUIRE(run_bin("build --config " + cfg) == 0);
    CHECK(io::sequence_from_json(read_json(out("sequence.json"))).torus_count() == 27);

    REQUIRE(run_bin("thin --config " + cfg + " --level 2") == 0);
    const auto cert = io::certificate_from_json(read_json(out("certificate.json")));
    CHECK(cert.verdict == certify::Verdict::Valid);
    CHECK(cert.covered_level == 2);
    CHECK(cert.claimed_eps == 0.5);

    REQUIRE(run_bin("shadow --config " + cfg + " --random 5") == 0);
    const auto metrics = read_json(out("metrics.json"));
    CHECK(metrics.at("ok") == true);
    CHECK(metrics.at("level") == 2);
    REQUIRE(metrics.at("planes").size() == 5);
    for (const auto& p : metrics.at("planes")) {
        CHECK(p.at("connected") == true);
        CHECK(p.at("certificate_consistent") == true);
        CHECK(p.at("inscribed_radius").get<double>() <= p.at("certified_bound").get<double>());
    }
    for (int k = 0; k < 5; ++k) CHECK(fs::exists(out("shadow_" + std::to_string(k) + ".pgm")));

    REQUIRE(run_bin("mesh --config " + cfg + " --level 2") == 0);
    const auto mesh = parse_obj(slurp(out("mesh_2.obj")));
    CHECK(mesh.vertices == 26u * 12u * 6u);
    CHECK(check_manifold(mesh) == 0);

    const std::string hash = cli::load_config(cfg).hash;
    CHECK(mesh.first_line == "# config_hash " + hash);
    for (const auto* name : {"sequence.json", "certificate.json", "metrics.json"})
        CHECK(read_json(out(name)).at("config_hash") == hash);

    // Same command into the same directory reproduces the bytes.
    const auto before = slurp(out("metrics.json"));
    const auto pgm = slurp(out("shadow_3.pgm"));
    REQUIRE(run_bin("shadow --config " + cfg + " --random 5") == 0);
    CHECK(slurp(out("metrics.json")) == before);
    CHECK(slurp(out("shadow_3.pgm")) == pgm);

    // A different seed moves the planes.
    REQUIRE(run_bin("shadow --config " + cfg + " --random 5 --seed 6") == 0);
    CHECK(slurp(out("metrics.json")) != before);

    io::write_file(out("sequence.json"), "{\"format\": \"necklace-sequence\", \"stages\": 3}");
    CHECK(run_bin("shadow --config " + cfg) == 2);
    CHECK(run_bin("mesh --config " + cfg) == 2);
}

TEST_CASE("build output is deterministic") {
    TempDir dir("determinism");
    write_config(dir, {{"depth", 2}, {"output_dir", "."}});
    const auto cfg = dir.file("config.json");
    REQUIRE(run_cli({"build", "--config", cfg}) == 0);
    const auto seq = slurp(dir.file("sequence.json"));
    const auto rep = slurp(dir.file("report.json"));
    REQUIRE(run_cli({"build", "--config", cfg}) == 0);
    CHECK(slurp(dir.file("sequence.json")) == seq);
    CHECK(slurp(dir.file("report.json")) == rep);
    CHECK(read_json(dir.file("report.json")).at("chains").size() == 1);
}

TEST_CASE("planar command: default, identity depth, broken pattern") {
    TempDir dir("planar");
    write_config(dir, {{"output_dir", "."}, {"planar", {{"depth", 2}}}});
    const auto cfg = dir.file("config.json");
    REQUIRE(run_bin("planar --config " + cfg) == 0);
    const auto doc = read_json(dir.file("planar.json"));
    CHECK(doc.at("covered") == true);
    CHECK(doc.at("levels").size() == 3);
    CHECK(doc.at("config_hash") == cli::load_config(cfg).hash);
    for (const auto& l : doc.at("levels")) {
        CHECK(l.at("cover").at("covered") == true);
        CHECK(l.at("disjoint") == true);
        CHECK(l.at("max_diameter").get<double>() <= l.at("diameter_bound").get<double>() * (1 + 1e-12));
    }
    CHECK(slurp(dir.file("planar.svg")).find("config_hash") != std::string::npos);

    write_config(dir, {{"output_dir", "."}, {"planar", {{"depth", 0}}}});
    REQUIRE(run_bin("planar --config " + cfg) == 0);
    const auto zero = read_json(dir.file("planar.json"));
    REQUIRE(zero.at("levels").size() == 1);
    CHECK(zero.at("levels")[0].at("pieces") == 1);
    CHECK(zero.at("levels")[0].at("cover").at("covered") == true);

    json broken = io::to_json(planar::shipped_hexagon_ifs());
    broken["maps"].erase(0);
    io::write_file(dir.file("broken.json"), broken.dump());
    write_config(dir, {{"output_dir", "."}, {"planar", {{"pattern", "broken.json"}, {"depth", 3}}}});
    CHECK(run_bin("planar --config " + cfg) == 1);
    const auto bad = read_json(dir.file("planar.json"));
    CHECK(bad.at("covered") == false);
    REQUIRE(bad.at("levels").size() == 2);
    CHECK(bad.at("levels")[1].at("cover").contains("witness_angle"));

    io::write_file(dir.file("broken.json"), "{\"format\": \"planar-ifs\"}");
    CHECK(run_bin("planar --config " + cfg) == 2);
}
