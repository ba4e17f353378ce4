// Writes the bundled filter assets (enhancement LUTs and AR overlay sprites)
// into an asset root directory consumable by FilterEngine.
#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "facebench/filter/engine.hpp"
#include "facebench/filter/tone_curves.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate the bundled filter asset tree"};
    std::string out = "assets";
    app.add_option("--out", out, "Asset root directory to write")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        facebench::filter::write_asset_root(out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "{\"error\":{\"type\":\"asset_write\",\"message\":\"%s\"}}\n",
                     e.what());
        return 1;
    }
    const auto ids = facebench::filter::enhancement_ids();
    std::printf("wrote %zu LUTs and 3 overlay assets under %s\n", ids.size(), out.c_str());
    return 0;
}
