#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "sphereview/image_io.hpp"
#include "sphereview/remap.hpp"
#include "sphereview/viewport.hpp"

namespace sphereview::cli {

int cmd_viewport(std::vector<std::string> args) {
    CLI::App app{"Extract perspective (gnomonic) viewports from equirectangular images",
                 "sphereview viewport"};
    std::vector<std::string> paths;
    std::string outdir = "out";
    std::string interp_name = "bilinear";
    std::string size_text = "256x256";
    double lon_deg = 0.0, lat_deg = 0.0, fovh_deg = 90.0, fovv_deg = 90.0;
    bool self_test = false;
    CommonOptions common;
    app.add_option("inputs", paths, "Input PNG files or directories")->required();
    app.add_option("-o,--out-dir", outdir, "Output directory (input basenames are kept)");
    app.add_option("--lon", lon_deg, "Viewpoint longitude, degrees in [-180, 180)");
    app.add_option("--lat", lat_deg, "Viewpoint latitude, degrees in [-90, 90]");
    app.add_option("--fovh", fovh_deg, "Horizontal field of view, degrees in (0, 180)");
    app.add_option("--fovv", fovv_deg, "Vertical field of view, degrees in (0, 180)");
    app.add_option("--size", size_text, "Viewport size as WxH");
    app.add_option("--interp", interp_name, "Resampling: nearest or bilinear")
        ->check(CLI::IsMember({"nearest", "bilinear"}));
    app.add_flag("--self-test", self_test,
                 "Check the viewport center pixel against a direct sample (odd sizes only)");
    app.add_option("-j,--jobs", common.jobs, "Worker threads (default: SPHEREVIEW_JOBS or 1)");
    app.add_flag("--keep-going", common.keep_going, "Exit 0 if at least one file succeeds");
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    constexpr double kRad = std::numbers::pi / 180.0;
    const ParsedSize size = parse_size(size_text);
    ViewportSpec spec;
    spec.viewpoint = {lon_deg * kRad, lat_deg * kRad};
    spec.fovh = fovh_deg * kRad;
    spec.fovv = fovv_deg * kRad;
    spec.out_w = size.w;
    spec.out_h = size.h;
    validate(spec);
    if (self_test && (size.w % 2 == 0 || size.h % 2 == 0))
        throw std::runtime_error("--self-test needs odd --size so a pixel center hits the viewpoint");

    const Interp interp = interp_name == "nearest" ? Interp::Nearest : Interp::Bilinear;
    const auto inputs = collect_inputs(paths, ".png");
    if (inputs.empty()) throw std::runtime_error("viewport: no input images found");

    const auto errors =
        run_parallel(inputs.size(), resolve_jobs(common.jobs), [&](size_t i) -> std::optional<std::string> {
            const Grid img = io::read_png(inputs[i]);
            const Grid out = extract_viewport(img, spec, interp);
            if (self_test) {
                const PixelCoord at = sphere_to_erp(spec.viewpoint, img.dims());
                for (int c = 0; c < img.channels(); ++c) {
                    const float direct = sample_channel(img, c, at, interp);
                    const float got = out.at(c, size.h / 2, size.w / 2);
                    if (std::abs(direct - got) > 1e-4f)
                        return "self-test failed: center pixel " + std::to_string(got) +
                               " vs direct sample " + std::to_string(direct);
                }
            }
            io::write_png(output_path(outdir, inputs[i]).string(), out);
            return std::nullopt;
        });
    return finish_batch(inputs, errors, common.keep_going);
}

} // namespace sphereview::cli
