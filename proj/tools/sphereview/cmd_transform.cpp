#include <algorithm>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "steps.hpp"
#include "sphereview/image_io.hpp"
#include "sphereview/remap.hpp"

namespace sphereview::cli {

int cmd_transform(std::vector<std::string> args) {
    std::vector<TransformStep> steps;
    args = extract_steps(args, steps);

    CLI::App app{"Warp equirectangular images through a composed view transform", "sphereview transform"};
    std::vector<std::string> paths;
    std::string outdir = "out";
    std::string interp_name = "bilinear";
    CommonOptions common;
    app.add_option("inputs", paths, "Input PNG files or directories")->required();
    app.add_option("-o,--out-dir", outdir, "Output directory (input basenames are kept)");
    app.add_option("--interp", interp_name, "Resampling: nearest or bilinear")
        ->check(CLI::IsMember({"nearest", "bilinear"}));
    app.add_option("-j,--jobs", common.jobs, "Worker threads (default: SPHEREVIEW_JOBS or 1)");
    app.add_flag("--keep-going", common.keep_going, "Exit 0 if at least one file succeeds");
    app.footer("Transform steps (applied in order, composed into one remap):\n"
               "  --rotate-h DEG          rotate about the vertical axis (0,0,1)\n"
               "  --rotate-v DEG          rotate about the axis (0,1,0)\n"
               "  --rotate X,Y,Z,DEG      rotate about an arbitrary axis\n"
               "  --zoom RHO              zoom, default center (0,0,-1)\n"
               "  --center X,Y,Z          retarget the preceding --zoom\n"
               "  --then                  optional separator between steps");
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (steps.empty())
        throw std::runtime_error(
            "transform: no steps given (use --rotate-h/--rotate-v/--rotate/--zoom)");

    const Interp interp = interp_name == "nearest" ? Interp::Nearest : Interp::Bilinear;
    const MobiusTransform total = compose_steps(steps);
    const auto inputs = collect_inputs(paths, ".png");
    if (inputs.empty()) throw std::runtime_error("transform: no input images found");

    const auto errors =
        run_parallel(inputs.size(), resolve_jobs(common.jobs), [&](size_t i) -> std::optional<std::string> {
            const Grid img = io::read_png(inputs[i]);
            const auto field = field_cache().get_or_build(total, img.dims());
            io::write_png(output_path(outdir, inputs[i]).string(), warp_image(img, *field, interp));
            return std::nullopt;
        });
    return finish_batch(inputs, errors, common.keep_going);
}

} // namespace sphereview::cli
