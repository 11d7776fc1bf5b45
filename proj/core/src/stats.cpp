#include "sphereview/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sphereview/geometry.hpp"

namespace sphereview::stats {

std::vector<Component> connected_components(const Mask& mask, bool wrap) {
    require_erp(mask.dims(), "connected_components");
    const int w = mask.width(), h = mask.height();
    std::vector<char> seen(static_cast<size_t>(w) * h, 0);
    std::vector<Component> out;
    std::vector<std::pair<int, int>> stack;

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c) || seen[static_cast<size_t>(r) * w + c]) continue;
            Component comp;
            stack.push_back({r, c});
            seen[static_cast<size_t>(r) * w + c] = 1;
            while (!stack.empty()) {
                auto [cr, cc] = stack.back();
                stack.pop_back();
                comp.pixels.push_back({cr, cc});
                auto visit = [&](int nr, int nc) {
                    if (nr < 0 || nr >= h) return;
                    if (nc < 0 || nc >= w) {
                        if (!wrap) return;
                        nc = (nc + w) % w;
                    }
                    size_t idx = static_cast<size_t>(nr) * w + nc;
                    if (mask.at(nr, nc) && !seen[idx]) {
                        seen[idx] = 1;
                        stack.push_back({nr, nc});
                    }
                };
                visit(cr - 1, cc);
                visit(cr + 1, cc);
                visit(cr, cc - 1);
                visit(cr, cc + 1);
            }
            out.push_back(std::move(comp));
        }
    }
    return out;
}

std::optional<double> distortion_degree(const Mask& mask) {
    require_erp(mask.dims(), "distortion_degree");
    const int w = mask.width(), h = mask.height();
    double sum = 0.0;
    int n = 0;
    for (int r = 0; r < h; ++r) {
        bool occupied = false;
        for (int c = 0; c < w; ++c)
            if (mask.at(r, c)) { occupied = true; break; }
        if (!occupied) continue;
        double lat = erp_to_sphere({0.0, static_cast<double>(r)}, mask.dims()).lat;
        sum += 1.0 / std::cos(lat);
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

bool edge_discontinuity(const Mask& mask) {
    require_erp(mask.dims(), "edge_discontinuity");
    const int w = mask.width(), h = mask.height();
    for (const Component& comp : wrap_components(mask)) {
        std::vector<char> left(h, 0), right(h, 0);
        for (auto [r, c] : comp.pixels) {
            if (c == 0) left[r] = 1;
            if (c == w - 1) right[r] = 1;
        }
        for (int r = 0; r < h; ++r)
            if (left[r] && right[r]) return true;
    }
    return false;
}

FovCoverage fov_coverage(const Mask& mask) {
    require_erp(mask.dims(), "fov_coverage");
    const int w = mask.width(), h = mask.height();
    FovCoverage fov;
    for (const Component& comp : wrap_components(mask)) {
        std::vector<char> col_occupied(w, 0);
        int rmin = h, rmax = -1;
        for (auto [r, c] : comp.pixels) {
            col_occupied[c] = 1;
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        // Longest circular run of unoccupied columns; scanning two periods
        // covers runs that cross the seam.
        int longest_gap = 0, run = 0;
        for (int j = 0; j < 2 * w; ++j) {
            if (!col_occupied[j % w]) {
                run = std::min(run + 1, w);
                longest_gap = std::max(longest_gap, run);
            } else {
                run = 0;
            }
        }
        double hfov = (w - longest_gap) * 360.0 / w;
        double vfov = (rmax - rmin + 1) * 180.0 / h;
        fov.max_hfov_deg = std::max(fov.max_hfov_deg, hfov);
        fov.max_vfov_deg = std::max(fov.max_vfov_deg, vfov);
    }
    return fov;
}

double foreground_ratio(const Mask& mask) {
    require_erp(mask.dims(), "foreground_ratio");
    return static_cast<double>(mask.count_foreground()) /
           (static_cast<double>(mask.width()) * mask.height());
}

RegionStats compute_region_stats(const Mask& mask) {
    RegionStats rs;
    rs.fg_ratio = foreground_ratio(mask);
    rs.distortion = distortion_degree(mask);
    rs.edge_discontinuous = edge_discontinuity(mask);
    FovCoverage fov = fov_coverage(mask);
    rs.max_hfov_deg = fov.max_hfov_deg;
    rs.max_vfov_deg = fov.max_vfov_deg;
    rs.n_components = static_cast<int>(wrap_components(mask).size());
    return rs;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, int bins, bool cumulative) {
    if (bins <= 0) throw std::invalid_argument("histogram: bins must be positive");
    if (values.empty()) return {};

    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    double n = static_cast<double>(values.size());

    if (lo == hi) {
        return {{lo, hi, 100.0}};
    }

    double width = (hi - lo) / bins;
    std::vector<size_t> counts(bins, 0);
    for (double v : values) {
        int idx = std::min(static_cast<int>((v - lo) / width), bins - 1);
        counts[std::max(idx, 0)]++;
    }
    std::vector<HistogramBin> out(bins);
    double running = 0.0;
    for (int i = 0; i < bins; ++i) {
        double pct = 100.0 * static_cast<double>(counts[i]) / n;
        running += pct;
        out[i] = {lo + i * width, i + 1 == bins ? hi : lo + (i + 1) * width,
                  cumulative ? running : pct};
    }
    return out;
}

std::vector<HistogramBin> dataset_histograms(const std::vector<RegionStats>& stats,
                                             Attribute attr, int bins, bool cumulative) {
    std::vector<double> values;
    values.reserve(stats.size());
    for (const RegionStats& rs : stats) {
        switch (attr) {
        case Attribute::FgRatio: values.push_back(rs.fg_ratio); break;
        case Attribute::Distortion:
            if (rs.distortion) values.push_back(*rs.distortion);
            break;
        case Attribute::MaxHfov: values.push_back(rs.max_hfov_deg); break;
        case Attribute::MaxVfov: values.push_back(rs.max_vfov_deg); break;
        }
    }
    return histogram(values, bins, cumulative);
}

} // namespace sphereview::stats
