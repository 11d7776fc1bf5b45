#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sphereview/grid.hpp"

namespace sphereview::stats {

// Connected pixel set; pixels are (row, col), row-major discovery order.
struct Component {
    std::vector<std::pair<int, int>> pixels;
};

// 4-connected components; when wrap is true, column w-1 is adjacent to
// column 0 (ERP longitude periodicity). No vertical wrap.
std::vector<Component> connected_components(const Mask& mask, bool wrap);

inline std::vector<Component> wrap_components(const Mask& mask) {
    return connected_components(mask, true);
}

// Mean of 1/cos(lat) over rows containing at least one foreground pixel,
// with row latitudes from the ERP pixel-center convention. Empty masks have
// no distortion value.
std::optional<double> distortion_degree(const Mask& mask);

// True iff some wrap component joins columns 0 and w-1 within one row, i.e.
// the +-180 degree meridian cuts through a connected region.
bool edge_discontinuity(const Mask& mask);

struct FovCoverage {
    double max_hfov_deg = 0.0;
    double max_vfov_deg = 0.0;
};

// Per component: horizontal coverage is 360 minus the largest circular gap
// in its occupied columns, vertical coverage the occupied row span. Returns
// the maxima over components, (0, 0) for an empty mask.
FovCoverage fov_coverage(const Mask& mask);

double foreground_ratio(const Mask& mask);

struct RegionStats {
    double fg_ratio = 0.0;
    std::optional<double> distortion;
    bool edge_discontinuous = false;
    double max_hfov_deg = 0.0;
    double max_vfov_deg = 0.0;
    int n_components = 0;
};

RegionStats compute_region_stats(const Mask& mask);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    double percent = 0.0;
};

// Uniform binning over [min, max]; percentages sum to 100. The cumulative
// variant is non-decreasing and ends at 100. Empty input yields no bins.
std::vector<HistogramBin> histogram(const std::vector<double>& values, int bins, bool cumulative);

enum class Attribute { FgRatio, Distortion, MaxHfov, MaxVfov };

// Histogram of one attribute over a dataset; samples without a distortion
// value are skipped for Attribute::Distortion.
std::vector<HistogramBin> dataset_histograms(const std::vector<RegionStats>& stats,
                                             Attribute attr, int bins, bool cumulative);

} // namespace sphereview::stats
