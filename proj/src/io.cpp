#include "necklace/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace necklace::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError) throw;
        throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
    }
}

void expect_format(const json& j, const char* format) {
    require(j.is_object(), ErrorKind::ParseError, std::string("expected a ") + format + " object");
    if (j.contains("format"))
        require(j.at("format").get<std::string>() == format, ErrorKind::ParseError,
                "document is not a " + std::string(format));
}

}  // namespace

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
    require(j.is_array() && j.size() == 3, ErrorKind::ParseError, "expected a 3-vector");
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json to_json(const geom::SolidTorus& t) {
    return {{"center", to_json(t.center())},
            {"normal", to_json(t.core().normal.vec())},
            {"R", t.major_radius()},
            {"r", t.minor_radius()}};
}

geom::SolidTorus torus_from_json(const json& j) {
    return guarded("torus", [&] {
        return geom::SolidTorus::make(
            geom::Circle3::make(vec3_from_json(j.at("center")), j.at("R").get<double>(), vec3_from_json(j.at("normal"))),
            j.at("r").get<double>());
    });
}

json to_json(const geom::Tube& t) {
    return {{"base", to_json(t.axis.base)}, {"direction", to_json(t.axis.direction.vec())}, {"radius", t.radius}};
}

geom::Tube tube_from_json(const json& j) {
    return guarded("tube", [&] {
        return geom::Tube::make(
            geom::Line3{vec3_from_json(j.at("base")), geom::Dir3::from(vec3_from_json(j.at("direction")))},
            j.at("radius").get<double>());
    });
}

json to_json(const antoine::ChainParams& p) {
    return {{"q", p.q},
            {"child_major_scale", p.child_major_scale},
            {"child_minor_ratio", p.child_minor_ratio},
            {"orientation_pattern", "alternating"}};
}

antoine::ChainParams chain_params_from_json(const json& j) {
    return guarded("chain params", [&] {
        require(j.is_object(), ErrorKind::ParseError, "chain params must be an object");
        const auto pattern = j.value("orientation_pattern", std::string("alternating"));
        require(pattern == "alternating", ErrorKind::ParseError, "unknown orientation pattern '" + pattern + "'");
        antoine::ChainParams p{j.at("q").get<int>(), j.at("child_major_scale").get<double>(),
                               j.at("child_minor_ratio").get<double>(), antoine::OrientationPattern::Alternating};
        p.validate();
        return p;
    });
}

json to_json(const antoine::ChainReport& r) {
    json j = {{"ok", r.ok()},
              {"disjoint", r.disjoint},
              {"contained", r.contained},
              {"regular_polygon", r.regular_polygon},
              {"linking_pattern", r.linking_pattern},
              {"null_homotopy_proxy", r.null_homotopy_proxy},
              {"congruent", r.congruent},
              {"min_separation", r.min_separation},
              {"min_containment_margin", r.min_containment_margin},
              {"max_link_residual", r.max_link_residual}};
    if (!r.disjoint) j["disjoint_violation"] = {r.disjoint_violation.first, r.disjoint_violation.second};
    if (!r.contained) j["containment_violation"] = r.containment_violation;
    if (!r.regular_polygon) j["polygon_violation"] = r.polygon_violation;
    if (!r.linking_pattern) j["linking_violation"] = {r.linking_violation.first, r.linking_violation.second};
    if (!r.null_homotopy_proxy) j["homotopy_violation"] = r.homotopy_violation;
    return j;
}

json to_json(const antoine::DefiningSequence& s) {
    json stages = json::array();
    for (const auto& st : s.stages) {
        json tori = json::array();
        for (std::size_t k = 0; k < st.tori.size(); ++k) {
            json t = to_json(st.tori[k]);
            t["parent"] = st.parent[k];
            tori.push_back(std::move(t));
        }
        stages.push_back({{"max_diameter", st.max_diameter}, {"tori", std::move(tori)}});
    }
    json params = json::array();
    for (const auto& p : s.params) params.push_back(to_json(p));
    return {{"format", "necklace-sequence"},
            {"version", 1},
            {"lambda", s.lambda},
            {"params", std::move(params)},
            {"stages", std::move(stages)}};
}

antoine::DefiningSequence sequence_from_json(const json& j) {
    return guarded("sequence", [&] {
        expect_format(j, "necklace-sequence");
        antoine::DefiningSequence s;
        s.lambda = j.at("lambda").get<double>();
        for (const auto& p : j.at("params")) s.params.push_back(chain_params_from_json(p));
        for (const auto& st : j.at("stages")) {
            antoine::Stage stage;
            stage.max_diameter = st.at("max_diameter").get<double>();
            for (const auto& t : st.at("tori")) {
                stage.tori.push_back(torus_from_json(t));
                stage.parent.push_back(t.at("parent").get<int>());
            }
            s.stages.push_back(std::move(stage));
        }
        require(!s.stages.empty() && s.stages.front().tori.size() == 1, ErrorKind::ParseError,
                "stage 1 must hold exactly one torus");
        for (std::size_t i = 1; i < s.stages.size(); ++i)
            for (int p : s.stages[i].parent)
                require(p >= 0 && p < static_cast<int>(s.stages[i - 1].tori.size()), ErrorKind::ParseError,
                        "parent index out of range at stage " + std::to_string(i + 1));
        return s;
    });
}

json to_json(const certify::PlankCertificate& c) {
    json tubes = json::array();
    for (const auto& t : c.tubes) tubes.push_back(to_json(t));
    return {{"format", "plank-certificate"},
            {"version", 1},
            {"covered_level", c.covered_level},
            {"total_width", c.total_width},
            {"claimed_eps", c.claimed_eps},
            {"evidence", {{"sample_spacing", c.evidence.sample_spacing}, {"margin", c.evidence.margin}}},
            {"verdict", certify::to_string(c.verdict)},
            {"tubes", std::move(tubes)}};
}

certify::PlankCertificate certificate_from_json(const json& j) {
    return guarded("certificate", [&] {
        expect_format(j, "plank-certificate");
        certify::PlankCertificate c;
        c.covered_level = j.at("covered_level").get<int>();
        c.total_width = j.at("total_width").get<double>();
        c.claimed_eps = j.at("claimed_eps").get<double>();
        c.evidence.sample_spacing = j.at("evidence").at("sample_spacing").get<double>();
        c.evidence.margin = j.at("evidence").at("margin").get<double>();
        c.verdict = certify::verdict_from_string(j.at("verdict").get<std::string>());
        for (const auto& t : j.at("tubes")) c.tubes.push_back(tube_from_json(t));
        return c;
    });
}

json to_json(const planar::PlanarIFS& ifs) {
    json root = json::array();
    for (const auto& v : ifs.root.vertices()) root.push_back({v.x, v.y});
    json maps = json::array();
    for (const auto& m : ifs.maps) maps.push_back({{m.a, m.b, m.e}, {m.c, m.d, m.f}});
    return {{"format", "planar-ifs"}, {"version", 1}, {"root", std::move(root)}, {"maps", std::move(maps)}};
}

planar::PlanarIFS ifs_from_json(const json& j) {
    return guarded("planar IFS", [&] {
        expect_format(j, "planar-ifs");
        std::vector<Vec2> root;
        for (const auto& v : j.at("root")) {
            require(v.is_array() && v.size() == 2, ErrorKind::ParseError, "root vertex must be [x, y]");
            root.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
        std::vector<planar::Affine2> maps;
        for (const auto& m : j.at("maps")) {
            require(m.is_array() && m.size() == 2 && m.at(0).size() == 3 && m.at(1).size() == 3,
                    ErrorKind::ParseError, "map must be a 2x3 array");
            maps.push_back({m[0][0].get<double>(), m[0][1].get<double>(), m[1][0].get<double>(),
                            m[1][1].get<double>(), m[0][2].get<double>(), m[1][2].get<double>()});
        }
        return planar::PlanarIFS::make(planar::ConvexPoly2::make(std::move(root)), std::move(maps));
    });
}

json to_json(const planar::CoverVerdict& v) {
    json j = {{"covered", v.covered},
              {"pieces_inside", v.pieces_inside},
              {"angles_tested", v.angles_tested},
              {"exact", v.exact},
              {"min_overlap", std::isfinite(v.min_overlap) ? json(v.min_overlap) : json(nullptr)}};
    if (v.witness_angle) j["witness_angle"] = *v.witness_angle;
    if (v.gap) j["gap"] = {v.gap->min, v.gap->max};
    if (!v.detail.empty()) j["detail"] = v.detail;
    return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, what + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::PreconditionViolation, "cannot write '" + path + "'");
    out << contents;
    require(static_cast<bool>(out), ErrorKind::PreconditionViolation, "write to '" + path + "' failed");
}

MeshStats write_obj(std::ostream& out, const std::vector<geom::SolidTorus>& tori, int rings, int segments,
                    const std::string& header) {
    require(rings >= 3 && segments >= 3, ErrorKind::PreconditionViolation,
            "tessellation needs at least 3 rings and 3 segments");
    MeshStats stats;
    if (!header.empty()) out << "# " << header << '\n';
    char buf[128];
    std::size_t base = 1;
    for (std::size_t k = 0; k < tori.size(); ++k) {
        out << "o torus_" << k << '\n';
        for (int i = 0; i < rings; ++i) {
            const double phi = 2.0 * geom::kPi * i / rings;
            for (int j = 0; j < segments; ++j) {
                const double theta = 2.0 * geom::kPi * j / segments;
                const auto p = tori[k].surface_point(phi, theta);
                std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
                out << buf;
            }
        }
        auto idx = [&](int i, int j) {
            return base + static_cast<std::size_t>((i % rings) * segments + (j % segments));
        };
        for (int i = 0; i < rings; ++i) {
            for (int j = 0; j < segments; ++j) {
                const auto a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
                out << "f " << a << ' ' << b << ' ' << c << '\n';
                out << "f " << a << ' ' << c << ' ' << d << '\n';
            }
        }
        base += static_cast<std::size_t>(rings * segments);
        stats.vertices += static_cast<std::size_t>(rings * segments);
        stats.faces += static_cast<std::size_t>(2 * rings * segments);
    }
    return stats;
}

}  // namespace necklace::io
