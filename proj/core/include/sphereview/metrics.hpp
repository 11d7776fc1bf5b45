#pragma once

#include <cstdint>
#include <vector>

#include "sphereview/grid.hpp"

namespace sphereview::metrics {

// Version tags for the pinned metric formulations, recorded in CSV headers.
inline constexpr const char* kWeightedFVersion = "original-2014";
inline constexpr const char* kSMeasureVersion = "original-2017";
inline constexpr const char* kEMeasureVersion = "original-2018";

struct MetricOptions {
    // Horizontal wrap for the weighted-F distance transform and error
    // spreading, matching ERP longitude periodicity. Disable to reproduce
    // planar reference implementations bit-for-bit in semantics.
    bool wrap_distances = true;
};

struct ThresholdPolicy {
    enum class Kind { Adaptive, Fixed };
    Kind kind = Kind::Adaptive;
    double value = 0.0;

    static ThresholdPolicy adaptive() { return {}; }
    static ThresholdPolicy fixed(double t) { return {Kind::Fixed, t}; }
};

// Mean absolute error between a [0,1] map and a binary mask.
double mae(const Grid& s, const Mask& g);

// F-measure with beta^2 = 0.3. Adaptive policy binarizes at
// min(1, 2*mean(s)) inclusive; an all-zero map scores 0. F = 0 when
// precision and recall both vanish. Throws on empty ground truth.
double f_beta(const Grid& s, const Mask& g, const ThresholdPolicy& policy = {});

// Maximum F-measure over the 256 thresholds i/255; equals the naive
// 256-pass sweep exactly. Throws on empty ground truth.
double max_f(const Grid& s, const Mask& g);

// Weighted F-measure: foreground-dependent error spreading (7x7 Gaussian,
// sigma 5), background weighting 2 - exp(ln(0.5)/5 * d) with d the distance
// to the nearest foreground pixel, combined with beta^2 = 0.3. Throws on
// empty ground truth.
double weighted_f(const Grid& s, const Mask& g, const MetricOptions& opts = {});

// Structure measure: 0.5 * object term + 0.5 * region term (4-block
// decomposition about the foreground centroid). Degenerate all-background /
// all-foreground masks fall back to 1 - mean(s) / mean(s).
double s_measure(const Grid& s, const Mask& g);

// Enhanced-alignment measure on the adaptively binarized map; degenerate
// all-background / all-foreground masks use 1 - s_bin / s_bin directly.
double e_measure(const Grid& s, const Mask& g);

struct MetricsReport {
    double mae = 0.0;
    double f_beta = 0.0;
    double w_f_beta = 0.0;
    double max_f = 0.0;
    double s_measure = 0.0;
    double e_measure = 0.0;
};

struct PairResult {
    MetricsReport report;
    // Empty ground truth defines only MAE; the other five are NaN and the
    // sample is excluded from their dataset means.
    bool gt_empty = false;
};

PairResult evaluate_pair(const Grid& s, const Mask& g, const MetricOptions& opts = {});

struct DatasetSummary {
    MetricsReport mean;
    size_t n_samples = 0;
    size_t n_empty_gt = 0;
};

// Per-metric arithmetic mean in input order; empty-GT samples count toward
// MAE only.
DatasetSummary aggregate_results(const std::vector<PairResult>& results);

struct CurvePoint {
    int rank = 0;
    double attr = 0.0;
    double score = 0.0;
};

// Sorts samples by attribute ascending (stable) and applies a centered
// moving average of the given window; edges shrink to the available span.
std::vector<CurvePoint> attribute_curves(std::vector<std::pair<double, double>> samples,
                                         int window);

// Planar bilinear resize with edge clamping (used to bring predictions to
// the mask's native resolution before evaluation).
Grid resize_bilinear(const Grid& in, const GridDims& out_dims);

namespace detail {

// Exact squared Euclidean distance transform with nearest-source tracking.
// Ties prefer the smaller column, then the smaller row. In wrap mode the
// distance is horizontally circular and nearest_col is reduced modulo w.
struct EdtResult {
    std::vector<int64_t> d2;
    std::vector<int32_t> nearest_row;
    std::vector<int32_t> nearest_col;
};
EdtResult edt(const Mask& fg, bool wrap);

// 7x7 Gaussian (sigma 5) filtering, zero padding vertically and, unless
// wrap_h, horizontally too.
std::vector<double> gaussian7(const std::vector<double>& in, const GridDims& dims, bool wrap_h);

} // namespace detail

} // namespace sphereview::metrics
