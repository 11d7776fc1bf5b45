#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "sphereview/image_io.hpp"
#include "sphereview/metrics.hpp"

namespace fs = std::filesystem;

namespace sphereview::cli {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// stem(path column) -> attribute value, read from a stats CSV.
std::map<std::string, double> load_attr_column(const std::string& path, const std::string& col) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        header = split_csv_line(line);
        break;
    }
    const auto it = std::find(header.begin(), header.end(), col);
    if (header.empty() || header[0] != "path" || it == header.end())
        throw std::runtime_error(path + ": need a 'path' column and a '" + col + "' column");
    const size_t idx = static_cast<size_t>(it - header.begin());
    std::map<std::string, double> attrs;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= idx || fields[idx].empty()) continue;
        attrs[fs::path(fields[0]).stem().string()] = std::stod(fields[idx]);
    }
    return attrs;
}

std::string metric_field(double v) { return std::isnan(v) ? std::string() : io::format_g6(v); }

} // namespace

int cmd_eval(std::vector<std::string> args) {
    CLI::App app{"Saliency metrics (MAE, F-measures, S-measure, E-measure) over paired prediction/mask sets",
                 "sphereview eval"};
    std::string pred_dir, gt_dir;
    std::string out_csv = "eval.csv";
    std::string attrs_csv, attr_col = "fg_ratio", curves_prefix = "curve";
    int window = 50;
    bool planar = false;
    CommonOptions common;
    app.add_option("--pred", pred_dir, "Directory of grayscale prediction PNGs")->required();
    app.add_option("--gt", gt_dir, "Directory of ground-truth mask PNGs")->required();
    app.add_option("-o,--out", out_csv, "Per-image + aggregate CSV destination");
    app.add_flag("--planar-distances", planar,
                 "Planar weighted-F distances instead of horizontal wrap");
    app.add_option("--attrs", attrs_csv,
                   "Stats CSV; joins on filename stem and emits attribute curves");
    app.add_option("--attr-col", attr_col, "Attribute column for the curves");
    app.add_option("--window", window, "Moving-average window for the curves")
        ->check(CLI::PositiveNumber);
    app.add_option("--curves-prefix", curves_prefix, "Curve CSVs go to <prefix>_<metric>.csv");
    app.add_option("-j,--jobs", common.jobs, "Worker threads (default: SPHEREVIEW_JOBS or 1)");
    app.add_flag("--keep-going", common.keep_going, "Exit 0 if at least one pair succeeds");
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const auto gts = collect_inputs({gt_dir}, ".png");
    metrics::MetricOptions opts;
    opts.wrap_distances = !planar;

    std::vector<std::optional<metrics::PairResult>> results(gts.size());
    const auto errors =
        run_parallel(gts.size(), resolve_jobs(common.jobs), [&](size_t i) -> std::optional<std::string> {
            const fs::path pred_path = fs::path(pred_dir) / fs::path(gts[i]).filename();
            if (!fs::exists(pred_path))
                return "missing prediction " + pred_path.string();
            const Mask gt = io::read_mask_png(gts[i]);
            Grid pred = io::read_prediction_png(pred_path.string());
            if (!(pred.dims() == gt.dims())) pred = metrics::resize_bilinear(pred, gt.dims());
            results[i] = metrics::evaluate_pair(pred, gt, opts);
            return std::nullopt;
        });

    std::vector<metrics::PairResult> ok;
    std::vector<size_t> ok_index;
    for (size_t i = 0; i < gts.size(); ++i) {
        if (!results[i]) continue;
        ok.push_back(*results[i]);
        ok_index.push_back(i);
    }
    const metrics::DatasetSummary summary = metrics::aggregate_results(ok);

    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_csv);
    out << "# wfb=" << metrics::kWeightedFVersion << " sm=" << metrics::kSMeasureVersion
        << " em=" << metrics::kEMeasureVersion << '\n';
    out << "# distances=" << (planar ? "planar" : "wrap") << '\n';
    out << "# samples=" << summary.n_samples << " empty_gt=" << summary.n_empty_gt << '\n';
    out << "path,mae,f_beta,w_f_beta,max_f,s_measure,e_measure\n";
    for (size_t k = 0; k < ok.size(); ++k) {
        const auto& r = ok[k].report;
        out << fs::path(gts[ok_index[k]]).filename().string() << ',' << io::format_g6(r.mae)
            << ',' << metric_field(r.f_beta) << ',' << metric_field(r.w_f_beta) << ','
            << metric_field(r.max_f) << ',' << metric_field(r.s_measure) << ','
            << metric_field(r.e_measure) << '\n';
    }
    const auto& m = summary.mean;
    out << "aggregate," << io::format_g6(m.mae) << ',' << metric_field(m.f_beta) << ','
        << metric_field(m.w_f_beta) << ',' << metric_field(m.max_f) << ','
        << metric_field(m.s_measure) << ',' << metric_field(m.e_measure) << '\n';
    out.close();

    if (!attrs_csv.empty()) {
        const auto attrs = load_attr_column(attrs_csv, attr_col);
        const std::pair<const char*, double metrics::MetricsReport::*> cols[] = {
            {"mae", &metrics::MetricsReport::mae},
            {"f_beta", &metrics::MetricsReport::f_beta},
            {"w_f_beta", &metrics::MetricsReport::w_f_beta},
            {"max_f", &metrics::MetricsReport::max_f},
            {"s_measure", &metrics::MetricsReport::s_measure},
            {"e_measure", &metrics::MetricsReport::e_measure},
        };
        for (const auto& [name, member] : cols) {
            std::vector<std::pair<double, double>> samples;
            for (size_t k = 0; k < ok.size(); ++k) {
                const double score = ok[k].report.*member;
                if (std::isnan(score)) continue;
                const auto it = attrs.find(fs::path(gts[ok_index[k]]).stem().string());
                if (it == attrs.end()) continue;
                samples.emplace_back(it->second, score);
            }
            const auto curve = metrics::attribute_curves(std::move(samples), window);
            const std::string path = curves_prefix + "_" + name + ".csv";
            std::ofstream curve_out(path, std::ios::binary);
            if (!curve_out) throw std::runtime_error("cannot open " + path);
            curve_out << "rank,attr,score_smoothed\n";
            for (const auto& p : curve)
                curve_out << p.rank << ',' << io::format_g6(p.attr) << ','
                          << io::format_g6(p.score) << '\n';
        }
    }
    return finish_batch(gts, errors, common.keep_going);
}

} // namespace sphereview::cli
