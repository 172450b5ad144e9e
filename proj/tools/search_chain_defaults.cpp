// Regenerates data/chain_defaults.json:
//   search_chain_defaults [out.json] [ratio ...]
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "necklace/antoine.hpp"
#include "necklace/io.hpp"

int main(int argc, char** argv) {
    using namespace necklace;
    std::string out_path;
    std::vector<double> ratios;
    for (int i = 1; i < argc; ++i) {
        char* end = nullptr;
        const double r = std::strtod(argv[i], &end);
        if (end && *end == '\0') {
            ratios.push_back(r);
        } else {
            out_path = argv[i];
        }
    }
    if (ratios.empty()) ratios = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};

    const antoine::ChainSearchOptions opts;
    io::json entries = io::json::array();
    for (double r : ratios) {
        try {
            const auto p = antoine::search_chain_params(r, opts);
            io::json e = io::to_json(p);
            e["ratio"] = r;
            entries.push_back(e);
            std::cerr << "ratio " << r << ": q=" << p.q << " scale=" << p.child_major_scale
                      << " child ratio=" << p.child_minor_ratio << '\n';
        } catch (const Error& e) {
            std::cerr << "ratio " << r << ": " << e.what() << '\n';
            return 1;
        }
    }
    const io::json doc = {
        {"format", "chain-defaults"},
        {"version", 1},
        {"generator", "tools/search_chain_defaults"},
        {"search",
         {{"q_max", opts.q_max},
          {"min_relative_separation", opts.min_relative_separation},
          {"min_relative_containment", opts.min_relative_containment},
          {"child_major_scale_grid", "1.05:0.05:1.95"}}},
        {"entries", entries}};
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        io::write_file(out_path, text);
    }
    return 0;
}
