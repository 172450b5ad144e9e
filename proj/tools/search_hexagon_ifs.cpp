// Regenerates data/hexagon_ifs.json by grid search over hexagon patterns:
// six corner copies (scale lam, each sharing a root vertex), an optional
// central copy (scale mu) and optional edge copies (scale nu, centered at
// t * edge midpoint). All coefficients are dyadic so images of the integer
// hexagon stay exact in floating point.
//   search_hexagon_ifs [out.json]
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "necklace/io.hpp"
#include "necklace/planar.hpp"

namespace {

using namespace necklace;
using planar::Affine2;

std::vector<Affine2> pattern(double lam, double mu, double nu, double t) {
    const auto hex = planar::integer_hexagon().vertices();
    std::vector<Affine2> maps;
    for (const auto& v : hex) maps.push_back({lam, 0, 0, lam, (1 - lam) * v.x, (1 - lam) * v.y});
    if (mu > 0) maps.push_back({mu, 0, 0, mu, 0, 0});
    if (nu > 0) {
        for (std::size_t j = 0; j < hex.size(); ++j) {
            const Vec2 m = (hex[j] + hex[(j + 1) % hex.size()]) * 0.5;
            maps.push_back({nu, 0, 0, nu, t * m.x, t * m.y});
        }
    }
    return maps;
}

}  // namespace

int main(int argc, char** argv) {
    struct Best {
        std::size_t maps;
        double score;
        double lam, mu, nu, t;
        double overlap, separation;
    };
    std::optional<Best> best;
    const auto root = planar::integer_hexagon();
    planar::AnglePolicy exact;
    exact.grid_degrees = 0.25;

    for (double lam : {0.25, 0.28125, 0.3125}) {
        for (double mu : {0.0, 0.125, 0.1875, 0.25, 0.3125}) {
            for (double nu : {0.0, 0.0625, 0.125, 0.1875}) {
                for (double t : {0.5, 0.625, 0.75, 0.8125}) {
                    if (nu == 0.0 && t != 0.5) continue;
                    std::optional<planar::PlanarIFS> ifs;
                    try {
                        ifs = planar::PlanarIFS::make(root, pattern(lam, mu, nu, t));
                    } catch (const Error&) {
                        continue;
                    }
                    const auto pieces = planar::planar_level(*ifs, 1);
                    const auto v = planar::shadow_cover_check(root, pieces, exact);
                    if (!v.covered || !v.pieces_inside || !v.exact) continue;
                    const auto sep = planar::pairwise_separation(pieces);
                    if (!(sep.min_distance > 0.0) || !(v.min_overlap > 0.0)) continue;
                    const double score = std::min(v.min_overlap, sep.min_distance);
                    std::cerr << "lam=" << lam << " mu=" << mu << " nu=" << nu << " t=" << t << " maps="
                              << ifs->maps.size() << " overlap=" << v.min_overlap << " separation=" << sep.min_distance
                              << '\n';
                    const Best b{ifs->maps.size(), score, lam, mu, nu, t, v.min_overlap, sep.min_distance};
                    if (!best || b.maps < best->maps || (b.maps == best->maps && b.score > best->score)) best = b;
                }
            }
        }
    }
    if (!best) {
        std::cerr << "no pattern passes\n";
        return 1;
    }
    const auto ifs = planar::PlanarIFS::make(root, pattern(best->lam, best->mu, best->nu, best->t));
    io::json doc = io::to_json(ifs);
    doc["generator"] = "tools/search_hexagon_ifs";
    doc["parameters"] = {{"corner_scale", best->lam}, {"center_scale", best->mu}, {"edge_scale", best->nu},
                         {"edge_offset", best->t}};
    doc["level1_min_overlap"] = best->overlap;
    doc["level1_min_separation"] = best->separation;
    const std::string text = doc.dump(2) + "\n";
    if (argc > 1) {
        io::write_file(argv[1], text);
    } else {
        std::cout << text;
    }
    return 0;
}
