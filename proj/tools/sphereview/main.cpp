#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "cli_common.hpp"

namespace {

constexpr const char* kUsage =
    "usage: sphereview <transform|viewport|stats|eval|savt> [options]\n"
    "\n"
    "  transform   warp equirectangular images through rotate/zoom steps\n"
    "  viewport    extract perspective viewports\n"
    "  stats       foreground statistics and histograms over mask sets\n"
    "  eval        saliency metrics over prediction/mask pairs\n"
    "  savt        view-transformed branch fusion on feature grids\n"
    "\n"
    "Run 'sphereview <subcommand> --help' for the flags of each subcommand.\n";

} // namespace

int main(int argc, char** argv) {
    if (argc < 2 || std::strcmp(argv[1], "-h") == 0 || std::strcmp(argv[1], "--help") == 0) {
        std::fputs(kUsage, argc < 2 ? stderr : stdout);
        return argc < 2 ? 2 : 0;
    }
    const std::string cmd = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);
    try {
        using namespace sphereview::cli;
        if (cmd == "transform") return cmd_transform(std::move(args));
        if (cmd == "viewport") return cmd_viewport(std::move(args));
        if (cmd == "stats") return cmd_stats(std::move(args));
        if (cmd == "eval") return cmd_eval(std::move(args));
        if (cmd == "savt") return cmd_savt(std::move(args));
        std::fprintf(stderr, "sphereview: unknown subcommand '%s'\n\n%s", cmd.c_str(), kUsage);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sphereview: error: %s\n", e.what());
        return 2;
    }
}
