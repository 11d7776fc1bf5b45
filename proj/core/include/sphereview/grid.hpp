#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphereview {

// Pixel dimensions of a raster grid. ERP panoramas require w == 2h; feature
// grids may be any shape, so the ratio is checked at the operations that
// assume equirectangular geometry, not at construction.
struct GridDims {
    int w = 0;
    int h = 0;

    friend bool operator==(const GridDims&, const GridDims&) = default;
};

inline void require_valid(const GridDims& d, const char* what) {
    if (d.w <= 0 || d.h <= 0)
        throw std::invalid_argument(std::string(what) + ": dimensions must be positive, got " +
                                    std::to_string(d.w) + "x" + std::to_string(d.h));
}

inline void require_erp(const GridDims& d, const char* what) {
    require_valid(d, what);
    if (d.w != 2 * d.h)
        throw std::invalid_argument(std::string(what) + ": ERP grid must be 2:1, got " +
                                    std::to_string(d.w) + "x" + std::to_string(d.h));
}

enum class Interp { Nearest, Bilinear };

// Planar multi-channel float grid: channel c occupies a contiguous h*w block
// in row-major order. Used for images, saliency maps, and feature grids.
class Grid {
public:
    Grid() = default;
    Grid(GridDims dims, int channels, float fill = 0.0f)
        : dims_(dims), channels_(channels),
          data_(static_cast<size_t>(dims.w) * dims.h * channels, fill) {
        require_valid(dims, "Grid");
        if (channels <= 0) throw std::invalid_argument("Grid: channels must be positive");
    }

    const GridDims& dims() const { return dims_; }
    int width() const { return dims_.w; }
    int height() const { return dims_.h; }
    int channels() const { return channels_; }
    size_t plane_size() const { return static_cast<size_t>(dims_.w) * dims_.h; }

    float& at(int c, int row, int col) {
        return data_[plane_size() * c + static_cast<size_t>(row) * dims_.w + col];
    }
    float at(int c, int row, int col) const {
        return data_[plane_size() * c + static_cast<size_t>(row) * dims_.w + col];
    }
    float* plane(int c) { return data_.data() + plane_size() * c; }
    const float* plane(int c) const { return data_.data() + plane_size() * c; }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    GridDims dims_{};
    int channels_ = 0;
    std::vector<float> data_;
};

// Binary mask over a raster grid; values are strictly 0 or 1.
class Mask {
public:
    Mask() = default;
    Mask(GridDims dims, uint8_t fill = 0) : dims_(dims), data_(static_cast<size_t>(dims.w) * dims.h, fill ? 1 : 0) {
        require_valid(dims, "Mask");
    }

    const GridDims& dims() const { return dims_; }
    int width() const { return dims_.w; }
    int height() const { return dims_.h; }

    uint8_t& at(int row, int col) { return data_[static_cast<size_t>(row) * dims_.w + col]; }
    uint8_t at(int row, int col) const { return data_[static_cast<size_t>(row) * dims_.w + col]; }

    std::vector<uint8_t>& data() { return data_; }
    const std::vector<uint8_t>& data() const { return data_; }

    size_t count_foreground() const {
        size_t n = 0;
        for (uint8_t v : data_) n += v;
        return n;
    }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    GridDims dims_{};
    std::vector<uint8_t> data_;
};

} // namespace sphereview
