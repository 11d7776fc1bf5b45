#include "sphereview/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sphereview::metrics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBeta2 = 0.3;

void require_pair(const Grid& s, const Mask& g, const char* what) {
    if (s.channels() != 1)
        throw std::invalid_argument(std::string(what) + ": saliency map must be single-channel");
    if (!(s.dims() == g.dims()))
        throw std::invalid_argument(std::string(what) + ": map and mask dimensions differ");
}

void require_foreground(const Mask& g, const char* what) {
    if (g.count_foreground() == 0)
        throw std::invalid_argument(std::string(what) + ": ground truth has no foreground");
}

double mean_of(const Grid& s) {
    double sum = 0.0;
    for (float v : s.data()) sum += v;
    return sum / static_cast<double>(s.data().size());
}

// Adaptive binarization shared by f_beta and e_measure: threshold
// min(1, 2*mean), inclusive; an all-zero map binarizes to all background.
std::vector<char> binarize_adaptive(const Grid& s) {
    size_t n = s.data().size();
    std::vector<char> bin(n, 0);
    double m = mean_of(s);
    if (m == 0.0) return bin;
    double t = std::min(2.0 * m, 1.0);
    for (size_t i = 0; i < n; ++i) bin[i] = s.data()[i] >= t;
    return bin;
}

double f_from_counts(size_t tp, size_t pred, size_t gt) {
    if (pred == 0 || tp == 0) return 0.0;
    double p = static_cast<double>(tp) / static_cast<double>(pred);
    double r = static_cast<double>(tp) / static_cast<double>(gt);
    return (1.0 + kBeta2) * p * r / (kBeta2 * p + r);
}

} // namespace

double mae(const Grid& s, const Mask& g) {
    require_pair(s, g, "mae");
    double sum = 0.0;
    size_t n = s.data().size();
    for (size_t i = 0; i < n; ++i) sum += std::abs(static_cast<double>(s.data()[i]) - g.data()[i]);
    return sum / static_cast<double>(n);
}

double f_beta(const Grid& s, const Mask& g, const ThresholdPolicy& policy) {
    require_pair(s, g, "f_beta");
    require_foreground(g, "f_beta");

    size_t n = s.data().size();
    std::vector<char> bin;
    if (policy.kind == ThresholdPolicy::Kind::Adaptive) {
        bin = binarize_adaptive(s);
    } else {
        bin.assign(n, 0);
        for (size_t i = 0; i < n; ++i) bin[i] = s.data()[i] >= policy.value;
    }

    size_t tp = 0, pred = 0, gt = 0;
    for (size_t i = 0; i < n; ++i) {
        pred += bin[i];
        gt += g.data()[i];
        tp += bin[i] & g.data()[i];
    }
    return f_from_counts(tp, pred, gt);
}

double max_f(const Grid& s, const Mask& g) {
    require_pair(s, g, "max_f");
    require_foreground(g, "max_f");

    std::array<double, 256> thresholds;
    for (int i = 0; i < 256; ++i) thresholds[i] = i / 255.0;

    // Pixel value v passes thresholds 0..k-1 where k = #{i : thresholds[i] <= v};
    // suffix sums over k then give the per-threshold counts of the naive sweep
    // with identical comparisons.
    std::array<size_t, 257> pred_at_k{}, tp_at_k{};
    size_t n = s.data().size(), gt = 0;
    for (size_t i = 0; i < n; ++i) {
        double v = s.data()[i];
        size_t k = static_cast<size_t>(
            std::upper_bound(thresholds.begin(), thresholds.end(), v) - thresholds.begin());
        pred_at_k[k]++;
        if (g.data()[i]) {
            tp_at_k[k]++;
            ++gt;
        }
    }

    double best = 0.0;
    size_t pred = 0, tp = 0;
    for (int i = 255; i >= 0; --i) {
        pred += pred_at_k[i + 1];
        tp += tp_at_k[i + 1];
        best = std::max(best, f_from_counts(tp, pred, gt));
    }
    return best;
}

namespace detail {

EdtResult edt(const Mask& fg, bool wrap) {
    if (wrap) {
        const int w = fg.width(), h = fg.height();
        Mask tiled({3 * w, h});
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                uint8_t v = fg.at(r, c);
                tiled.at(r, c) = v;
                tiled.at(r, c + w) = v;
                tiled.at(r, c + 2 * w) = v;
            }
        EdtResult full = edt(tiled, false);
        EdtResult out;
        out.d2.resize(static_cast<size_t>(w) * h);
        out.nearest_row.resize(out.d2.size());
        out.nearest_col.resize(out.d2.size());
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                size_t src = static_cast<size_t>(r) * (3 * w) + (c + w);
                size_t dst = static_cast<size_t>(r) * w + c;
                out.d2[dst] = full.d2[src];
                out.nearest_row[dst] = full.nearest_row[src];
                out.nearest_col[dst] = full.nearest_col[src] % w;
            }
        return out;
    }

    const int w = fg.width(), h = fg.height();
    const int64_t kInf = std::numeric_limits<int64_t>::max() / 4;
    size_t n = static_cast<size_t>(w) * h;

    // Pass 1, per column: nearest foreground row. Equidistant candidates
    // resolve to the smaller row.
    std::vector<int64_t> d1(n, kInf);
    std::vector<int32_t> row1(n, -1);
    for (int c = 0; c < w; ++c) {
        int last = -1;
        for (int r = 0; r < h; ++r) {
            if (fg.at(r, c)) last = r;
            if (last >= 0) {
                size_t i = static_cast<size_t>(r) * w + c;
                d1[i] = static_cast<int64_t>(r - last) * (r - last);
                row1[i] = last;
            }
        }
        int next = -1;
        for (int r = h - 1; r >= 0; --r) {
            if (fg.at(r, c)) next = r;
            if (next >= 0) {
                size_t i = static_cast<size_t>(r) * w + c;
                int64_t d = static_cast<int64_t>(next - r) * (next - r);
                if (d < d1[i]) {
                    d1[i] = d;
                    row1[i] = next;
                }
            }
        }
    }

    // Pass 2, per row: lower envelope of the column parabolas. The strict
    // advance below keeps the earlier (smaller) source column at exact ties.
    EdtResult out;
    out.d2.assign(n, kInf);
    out.nearest_row.assign(n, -1);
    out.nearest_col.assign(n, -1);

    std::vector<int> v(w);
    std::vector<double> z(w + 1);
    for (int r = 0; r < h; ++r) {
        const int64_t* f = d1.data() + static_cast<size_t>(r) * w;
        int k = -1;
        for (int q = 0; q < w; ++q) {
            if (f[q] >= kInf) continue;
            double fq = static_cast<double>(f[q]) + static_cast<double>(q) * q;
            while (k >= 0) {
                int p = v[k];
                double s = (fq - (static_cast<double>(f[p]) + static_cast<double>(p) * p)) /
                           (2.0 * q - 2.0 * p);
                if (s <= z[k]) {
                    --k;
                } else {
                    z[k + 1] = s;
                    break;
                }
            }
            if (k < 0) z[0] = -std::numeric_limits<double>::infinity();
            v[++k] = q;
            z[k + 1] = std::numeric_limits<double>::infinity();
        }
        if (k < 0) continue; // row of an entirely empty mask
        int j = 0;
        for (int q = 0; q < w; ++q) {
            while (z[j + 1] < q) ++j;
            int src = v[j];
            size_t i = static_cast<size_t>(r) * w + q;
            out.d2[i] = static_cast<int64_t>(q - src) * (q - src) + f[src];
            out.nearest_row[i] = row1[static_cast<size_t>(r) * w + src];
            out.nearest_col[i] = src;
        }
    }
    return out;
}

std::vector<double> gaussian7(const std::vector<double>& in, const GridDims& dims, bool wrap_h) {
    const int w = dims.w, h = dims.h;
    std::array<double, 7> k1;
    double s1 = 0.0;
    for (int i = 0; i < 7; ++i) {
        k1[i] = std::exp(-static_cast<double>((i - 3) * (i - 3)) / 50.0);
        s1 += k1[i];
    }
    for (double& v : k1) v /= s1;

    std::vector<double> tmp(in.size(), 0.0), out(in.size(), 0.0);
    for (int r = 0; r < h; ++r) {
        const double* src = in.data() + static_cast<size_t>(r) * w;
        double* dst = tmp.data() + static_cast<size_t>(r) * w;
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int t = -3; t <= 3; ++t) {
                int cc = c + t;
                if (wrap_h) {
                    cc = (cc + w) % w;
                } else if (cc < 0 || cc >= w) {
                    continue;
                }
                acc += k1[t + 3] * src[cc];
            }
            dst[c] = acc;
        }
    }
    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r) {
            double acc = 0.0;
            for (int t = -3; t <= 3; ++t) {
                int rr = r + t;
                if (rr < 0 || rr >= h) continue;
                acc += k1[t + 3] * tmp[static_cast<size_t>(rr) * w + c];
            }
            out[static_cast<size_t>(r) * w + c] = acc;
        }
    }
    return out;
}

} // namespace detail

double weighted_f(const Grid& s, const Mask& g, const MetricOptions& opts) {
    require_pair(s, g, "weighted_f");
    require_foreground(g, "weighted_f");

    const int w = s.width(), h = s.height();
    size_t n = s.data().size();

    std::vector<double> e(n);
    for (size_t i = 0; i < n; ++i) e[i] = std::abs(static_cast<double>(s.data()[i]) - g.data()[i]);

    detail::EdtResult dt = detail::edt(g, opts.wrap_distances);

    // Background errors take the error of their nearest foreground pixel
    // before spreading, so the Gaussian measures foreground dependency only.
    std::vector<double> et = e;
    for (size_t i = 0; i < n; ++i)
        if (!g.data()[i])
            et[i] = e[static_cast<size_t>(dt.nearest_row[i]) * w + dt.nearest_col[i]];

    std::vector<double> ea = detail::gaussian7(et, {w, h}, opts.wrap_distances);

    double sum_fg_ew = 0.0, sum_bg_ew = 0.0;
    size_t gt = 0;
    for (size_t i = 0; i < n; ++i) {
        if (g.data()[i]) {
            double err = ea[i] < e[i] ? ea[i] : e[i];
            sum_fg_ew += err;
            ++gt;
        } else {
            double b = 2.0 - std::exp(std::log(0.5) / 5.0 * std::sqrt(static_cast<double>(dt.d2[i])));
            sum_bg_ew += e[i] * b;
        }
    }

    double tpw = static_cast<double>(gt) - sum_fg_ew;
    double fpw = sum_bg_ew;
    double r = 1.0 - sum_fg_ew / static_cast<double>(gt);
    double p = tpw / (kEps + tpw + fpw);
    return (1.0 + kBeta2) * r * p / (kEps + kBeta2 * p + r);
}

namespace {

// Object similarity 2x / (x^2 + 1 + sigma_x) over one region; sigma uses
// N-1 normalization and is 0 for single-pixel regions.
double object_score(const std::vector<double>& values) {
    size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double sigma = 0.0;
    if (n > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - mean) * (v - mean);
        sigma = std::sqrt(acc / static_cast<double>(n - 1));
    }
    return 2.0 * mean / (mean * mean + 1.0 + sigma + kEps);
}

// Block-level structural similarity of the region-aware term.
double ssim_block(const Grid& s, const Mask& g, int r0, int r1, int c0, int c1) {
    int64_t cnt = static_cast<int64_t>(r1 - r0) * (c1 - c0);
    if (cnt <= 0) return 0.0;
    double n = static_cast<double>(cnt);

    double mx = 0.0, my = 0.0;
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) {
            mx += s.at(0, r, c);
            my += g.at(r, c);
        }
    mx /= n;
    my /= n;

    double sx = 0.0, sy = 0.0, sxy = 0.0;
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) {
            double dx = s.at(0, r, c) - mx;
            double dy = g.at(r, c) - my;
            sx += dx * dx;
            sy += dy * dy;
            sxy += dx * dy;
        }
    double denom = n - 1.0 + kEps;
    sx /= denom;
    sy /= denom;
    sxy /= denom;

    double alpha = 4.0 * mx * my * sxy;
    double beta = (mx * mx + my * my) * (sx + sy);
    if (alpha != 0.0) return alpha / (beta + kEps);
    return beta == 0.0 ? 1.0 : 0.0;
}

double s_object(const Grid& s, const Mask& g) {
    std::vector<double> fg_vals, bg_vals;
    size_t n = s.data().size();
    for (size_t i = 0; i < n; ++i) {
        if (g.data()[i])
            fg_vals.push_back(s.data()[i]);
        else
            bg_vals.push_back(1.0 - s.data()[i]);
    }
    double y = static_cast<double>(fg_vals.size()) / static_cast<double>(n);
    return y * object_score(fg_vals) + (1.0 - y) * object_score(bg_vals);
}

double s_region(const Grid& s, const Mask& g) {
    const int w = g.width(), h = g.height();
    double total = static_cast<double>(g.count_foreground());
    double sx = 0.0, sy = 0.0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (g.at(r, c)) {
                sx += c + 1.0; // 1-based centroid, rounded half away from zero
                sy += r + 1.0;
            }
    int cx = static_cast<int>(std::llround(sx / total));
    int cy = static_cast<int>(std::llround(sy / total));

    double area = static_cast<double>(w) * h;
    double w1 = (static_cast<double>(cx) * cy) / area;
    double w2 = (static_cast<double>(w - cx) * cy) / area;
    double w3 = (static_cast<double>(cx) * (h - cy)) / area;
    double w4 = 1.0 - w1 - w2 - w3;

    return w1 * ssim_block(s, g, 0, cy, 0, cx) + w2 * ssim_block(s, g, 0, cy, cx, w) +
           w3 * ssim_block(s, g, cy, h, 0, cx) + w4 * ssim_block(s, g, cy, h, cx, w);
}

} // namespace

double s_measure(const Grid& s, const Mask& g) {
    require_pair(s, g, "s_measure");
    size_t fg = g.count_foreground();
    if (fg == 0) return 1.0 - mean_of(s);
    if (fg == g.data().size()) return mean_of(s);
    double q = 0.5 * s_object(s, g) + 0.5 * s_region(s, g);
    return q < 0.0 ? 0.0 : q;
}

double e_measure(const Grid& s, const Mask& g) {
    require_pair(s, g, "e_measure");
    size_t n = s.data().size();
    std::vector<char> fm = binarize_adaptive(s);
    size_t fg = g.count_foreground();

    double sum_enhanced = 0.0;
    if (fg == 0) {
        for (size_t i = 0; i < n; ++i) sum_enhanced += fm[i] ? 0.0 : 1.0;
    } else if (fg == n) {
        for (size_t i = 0; i < n; ++i) sum_enhanced += fm[i] ? 1.0 : 0.0;
    } else {
        double mu_f = 0.0, mu_g = 0.0;
        for (size_t i = 0; i < n; ++i) {
            mu_f += fm[i];
            mu_g += g.data()[i];
        }
        mu_f /= static_cast<double>(n);
        mu_g /= static_cast<double>(n);
        for (size_t i = 0; i < n; ++i) {
            double pf = fm[i] - mu_f;
            double pg = g.data()[i] - mu_g;
            double xi = 2.0 * pf * pg / (pf * pf + pg * pg + kEps);
            sum_enhanced += (xi + 1.0) * (xi + 1.0) / 4.0;
        }
    }
    return sum_enhanced / static_cast<double>(n);
}

PairResult evaluate_pair(const Grid& s, const Mask& g, const MetricOptions& opts) {
    require_pair(s, g, "evaluate_pair");
    PairResult pr;
    pr.gt_empty = g.count_foreground() == 0;
    pr.report.mae = mae(s, g);
    if (pr.gt_empty) {
        double nan = std::numeric_limits<double>::quiet_NaN();
        pr.report.f_beta = pr.report.w_f_beta = pr.report.max_f = nan;
        pr.report.s_measure = pr.report.e_measure = nan;
        return pr;
    }
    pr.report.f_beta = f_beta(s, g);
    pr.report.w_f_beta = weighted_f(s, g, opts);
    pr.report.max_f = max_f(s, g);
    pr.report.s_measure = s_measure(s, g);
    pr.report.e_measure = e_measure(s, g);
    return pr;
}

DatasetSummary aggregate_results(const std::vector<PairResult>& results) {
    DatasetSummary ds;
    ds.n_samples = results.size();
    double sum_mae = 0.0, sum_f = 0.0, sum_wf = 0.0, sum_mf = 0.0, sum_sm = 0.0, sum_em = 0.0;
    size_t valid = 0;
    for (const PairResult& pr : results) {
        sum_mae += pr.report.mae;
        if (pr.gt_empty) {
            ds.n_empty_gt++;
            continue;
        }
        ++valid;
        sum_f += pr.report.f_beta;
        sum_wf += pr.report.w_f_beta;
        sum_mf += pr.report.max_f;
        sum_sm += pr.report.s_measure;
        sum_em += pr.report.e_measure;
    }
    if (ds.n_samples > 0) ds.mean.mae = sum_mae / static_cast<double>(ds.n_samples);
    if (valid > 0) {
        double dn = static_cast<double>(valid);
        ds.mean.f_beta = sum_f / dn;
        ds.mean.w_f_beta = sum_wf / dn;
        ds.mean.max_f = sum_mf / dn;
        ds.mean.s_measure = sum_sm / dn;
        ds.mean.e_measure = sum_em / dn;
    } else {
        double nan = std::numeric_limits<double>::quiet_NaN();
        ds.mean.f_beta = ds.mean.w_f_beta = ds.mean.max_f = nan;
        ds.mean.s_measure = ds.mean.e_measure = nan;
    }
    return ds;
}

std::vector<CurvePoint> attribute_curves(std::vector<std::pair<double, double>> samples,
                                         int window) {
    if (window < 1) throw std::invalid_argument("attribute_curves: window must be >= 1");
    std::stable_sort(samples.begin(), samples.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    int n = static_cast<int>(samples.size());
    std::vector<CurvePoint> out(n);
    for (int i = 0; i < n; ++i) {
        int lo = std::max(i - (window - 1) / 2, 0);
        int hi = std::min(i + window / 2, n - 1);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += samples[j].second;
        out[i] = {i, samples[i].first, acc / (hi - lo + 1)};
    }
    return out;
}

Grid resize_bilinear(const Grid& in, const GridDims& out_dims) {
    require_valid(out_dims, "resize_bilinear");
    if (in.dims() == out_dims) return in;
    Grid out(out_dims, in.channels());
    double sx = static_cast<double>(in.width()) / out_dims.w;
    double sy = static_cast<double>(in.height()) / out_dims.h;
    for (int c = 0; c < in.channels(); ++c) {
        const float* src = in.plane(c);
        for (int r = 0; r < out_dims.h; ++r) {
            double y = std::clamp((r + 0.5) * sy - 0.5, 0.0, in.height() - 1.0);
            int r0 = static_cast<int>(y);
            int r1 = std::min(r0 + 1, in.height() - 1);
            float fy = static_cast<float>(y - r0);
            for (int col = 0; col < out_dims.w; ++col) {
                double x = std::clamp((col + 0.5) * sx - 0.5, 0.0, in.width() - 1.0);
                int c0 = static_cast<int>(x);
                int c1 = std::min(c0 + 1, in.width() - 1);
                float fx = static_cast<float>(x - c0);
                const float* top = src + static_cast<size_t>(r0) * in.width();
                const float* bot = src + static_cast<size_t>(r1) * in.width();
                float v0 = top[c0] + fx * (top[c1] - top[c0]);
                float v1 = bot[c0] + fx * (bot[c1] - bot[c0]);
                out.at(c, r, col) = v0 + fy * (v1 - v0);
            }
        }
    }
    return out;
}

} // namespace sphereview::metrics
