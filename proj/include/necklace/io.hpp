#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "necklace/antoine.hpp"
#include "necklace/certify.hpp"
#include "necklace/planar.hpp"

/// JSON documents, OBJ meshes and hashing. Field names are listed in
/// docs/formats.md; doubles are written in shortest round-trip form, so every
/// reader here reproduces its writer's input bit for bit.
namespace necklace::io {

using nlohmann::json;

[[nodiscard]] json to_json(const Vec3& v);
[[nodiscard]] Vec3 vec3_from_json(const json& j);

[[nodiscard]] json to_json(const geom::SolidTorus& t);
[[nodiscard]] geom::SolidTorus torus_from_json(const json& j);

[[nodiscard]] json to_json(const geom::Tube& t);
[[nodiscard]] geom::Tube tube_from_json(const json& j);

[[nodiscard]] json to_json(const antoine::ChainParams& p);
[[nodiscard]] antoine::ChainParams chain_params_from_json(const json& j);

[[nodiscard]] json to_json(const antoine::ChainReport& r);

[[nodiscard]] json to_json(const antoine::DefiningSequence& s);
/// Throws ParseError on missing fields, bad shapes or invalid geometry.
[[nodiscard]] antoine::DefiningSequence sequence_from_json(const json& j);

[[nodiscard]] json to_json(const certify::PlankCertificate& c);
[[nodiscard]] certify::PlankCertificate certificate_from_json(const json& j);

[[nodiscard]] json to_json(const planar::PlanarIFS& ifs);
[[nodiscard]] planar::PlanarIFS ifs_from_json(const json& j);

[[nodiscard]] json to_json(const planar::CoverVerdict& v);

/// 64-bit FNV-1a, printed as 16 lowercase hex digits.
[[nodiscard]] std::uint64_t fnv1a(const std::string& bytes);
[[nodiscard]] std::string hex64(std::uint64_t h);

/// Reads a whole file; throws ParseError when it cannot be opened.
[[nodiscard]] std::string read_file(const std::string& path);
/// Parses JSON text, mapping syntax errors to ParseError.
[[nodiscard]] json parse_json(const std::string& text, const std::string& what);
void write_file(const std::string& path, const std::string& contents);

struct MeshStats {
    std::size_t vertices = 0;
    std::size_t faces = 0;
};

/// Triangulated tori, one `o torus_<k>` group each, rings x segments vertices
/// per torus (rings around the core, segments around the tube).
MeshStats write_obj(std::ostream& out, const std::vector<geom::SolidTorus>& tori, int rings, int segments,
                    const std::string& header = {});

}  // namespace necklace::io
