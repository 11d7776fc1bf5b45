#include <algorithm>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "sphereview/image_io.hpp"
#include "sphereview/stats.hpp"

namespace sphereview::cli {

namespace {

Mask resize_mask_nearest(const Mask& in, int out_w, int out_h) {
    const auto [w, h] = in.dims();
    if (w == out_w && h == out_h) return in;
    Mask out({out_w, out_h});
    for (int r = 0; r < out_h; ++r) {
        const int sr = std::min<int>(h - 1, static_cast<int>((r + 0.5) * h / out_h));
        for (int c = 0; c < out_w; ++c) {
            const int sc = std::min<int>(w - 1, static_cast<int>((c + 0.5) * w / out_w));
            out.at(r, c) = in.at(sr, sc);
        }
    }
    return out;
}

void write_histogram(const std::string& path, const std::vector<stats::HistogramBin>& bins) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "bin_lo,bin_hi,percent\n";
    for (const auto& b : bins)
        out << io::format_g6(b.lo) << ',' << io::format_g6(b.hi) << ','
            << io::format_g6(b.percent) << '\n';
}

} // namespace

int cmd_stats(std::vector<std::string> args) {
    CLI::App app{"Foreground statistics (area, distortion, discontinuity, field of view) over mask sets",
                 "sphereview stats"};
    std::vector<std::string> paths;
    std::string out_csv = "stats.csv";
    std::string hist_prefix;
    std::string resize_text;
    int bins = 20;
    CommonOptions common;
    app.add_option("inputs", paths, "Mask PNG files or directories")->required();
    app.add_option("-o,--out", out_csv, "Per-mask CSV destination");
    app.add_option("--hist-prefix", hist_prefix,
                   "Also write <prefix>_<attr>_{hist,cum}.csv histogram CSVs");
    app.add_option("--bins", bins, "Histogram bin count")->check(CLI::PositiveNumber);
    app.add_option("--resize", resize_text, "Resize masks to WxH (nearest) before measuring");
    app.add_option("-j,--jobs", common.jobs, "Worker threads (default: SPHEREVIEW_JOBS or 1)");
    app.add_flag("--keep-going", common.keep_going, "Exit 0 if at least one mask succeeds");
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::optional<ParsedSize> resize;
    if (!resize_text.empty()) resize = parse_size(resize_text);

    const auto inputs = collect_inputs(paths, ".png");
    std::vector<std::optional<stats::RegionStats>> rows(inputs.size());
    const auto errors =
        run_parallel(inputs.size(), resolve_jobs(common.jobs), [&](size_t i) -> std::optional<std::string> {
            Mask mask = io::read_mask_png(inputs[i]);
            if (resize) mask = resize_mask_nearest(mask, resize->w, resize->h);
            rows[i] = stats::compute_region_stats(mask);
            return std::nullopt;
        });

    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_csv);
    out << "path,fg_ratio,distortion,edge_disc,max_hfov_deg,max_vfov_deg,n_components\n";
    std::vector<stats::RegionStats> ok;
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (!rows[i]) continue;
        const auto& r = *rows[i];
        out << inputs[i] << ',' << io::format_g6(r.fg_ratio) << ','
            << (r.distortion ? io::format_g6(*r.distortion) : std::string()) << ','
            << (r.edge_discontinuous ? 1 : 0) << ',' << io::format_g6(r.max_hfov_deg) << ','
            << io::format_g6(r.max_vfov_deg) << ',' << r.n_components << '\n';
        ok.push_back(r);
    }
    out.close();

    if (!hist_prefix.empty()) {
        const std::pair<stats::Attribute, const char*> attrs[] = {
            {stats::Attribute::FgRatio, "fg_ratio"},
            {stats::Attribute::Distortion, "distortion"},
            {stats::Attribute::MaxHfov, "max_hfov"},
            {stats::Attribute::MaxVfov, "max_vfov"},
        };
        for (const auto& [attr, name] : attrs) {
            write_histogram(hist_prefix + "_" + name + "_hist.csv",
                            stats::dataset_histograms(ok, attr, bins, false));
            write_histogram(hist_prefix + "_" + name + "_cum.csv",
                            stats::dataset_histograms(ok, attr, bins, true));
        }
    }
    return finish_batch(inputs, errors, common.keep_going);
}

} // namespace sphereview::cli
