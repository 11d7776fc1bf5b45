#include <algorithm>
#include <cstdio>
#include <mutex>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "sphereview/fusion.hpp"
#include "sphereview/image_io.hpp"

namespace sphereview::cli {

int cmd_savt(std::vector<std::string> args) {
    CLI::App app{"View-transformed branch fusion over feature-grid files", "sphereview savt"};
    std::vector<std::string> paths;
    std::string outdir = "out";
    std::string config_path;
    bool print_weights = false;
    CommonOptions common;
    app.add_option("inputs", paths, "Input .fgrid files or directories")->required();
    app.add_option("-o,--out-dir", outdir, "Output directory (input basenames are kept)");
    app.add_option("--config", config_path,
                   "Branch/gating configuration file (default: table defaults, zero gating)");
    app.add_flag("--print-weights", print_weights, "Print per-file gate weights to stderr");
    app.add_option("-j,--jobs", common.jobs, "Worker threads (default: SPHEREVIEW_JOBS or 1)");
    app.add_flag("--keep-going", common.keep_going, "Exit 0 if at least one file succeeds");
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    fusion::SavtConfig cfg;
    if (!config_path.empty())
        cfg = fusion::load_savt_config(config_path);
    else
        cfg.specs = fusion::default_branch_specs();

    fusion::GatingParams gating;
    const bool gating_from_file = !cfg.gating_file.empty();
    if (gating_from_file) gating = fusion::load_gating_params(cfg.gating_file);

    const auto inputs = collect_inputs(paths, ".fgrid");
    if (inputs.empty()) throw std::runtime_error("savt: no input feature grids found");

    std::mutex stderr_mutex;
    const auto errors =
        run_parallel(inputs.size(), resolve_jobs(common.jobs), [&](size_t i) -> std::optional<std::string> {
            const Grid fg = io::read_fgrid(inputs[i]);
            const int branches = 1 + static_cast<int>(cfg.specs.size());
            const fusion::GatingParams params =
                gating_from_file ? gating
                                 : fusion::GatingParams::zeros(fg.channels(), branches,
                                                               cfg.gating_reduction);
            if (print_weights) {
                const fusion::FusionWeights w = fusion::gate_weights(fg, params);
                std::string line = inputs[i];
                for (double v : w.w) line += " " + io::format_g6(v);
                const std::lock_guard<std::mutex> lock(stderr_mutex);
                std::fprintf(stderr, "%s\n", line.c_str());
            }
            const Grid out = fusion::savt_forward(fg, cfg.specs, params, cfg.interp);
            io::write_fgrid(output_path(outdir, inputs[i]).string(), out);
            return std::nullopt;
        });
    return finish_batch(inputs, errors, common.keep_going);
}

} // namespace sphereview::cli
