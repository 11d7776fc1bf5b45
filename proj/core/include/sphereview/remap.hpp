#pragma once

#include <memory>
#include <vector>

#include "sphereview/grid.hpp"
#include "sphereview/mobius.hpp"

namespace sphereview {

// Dense backward-warp field: src(i, j) holds the continuous source pixel for
// output pixel (i, j). After normalization u lies in [0, w), v in [0, h], and
// coordinates within 2^-20 px of an integer are snapped to it, so coordinate-
// exact maps (identity, whole-column shifts) come out exact despite rounding.
struct RemapField {
    GridDims dims{};
    std::vector<PixelCoord> src;

    const PixelCoord& at(int row, int col) const {
        return src[static_cast<size_t>(row) * dims.w + col];
    }
    PixelCoord& at(int row, int col) {
        return src[static_cast<size_t>(row) * dims.w + col];
    }
};

// Continuous forward map of one pixel-center coordinate through f on the
// sphere: erp -> sphere -> plane -> f -> plane -> sphere -> erp. The returned
// v is unclamped (it stays within [-0.5, h-0.5]); u is wrapped into [0, w).
PixelCoord transform_pixel(const PixelCoord& pix, const MobiusTransform& f, const GridDims& dims);

// Backward field realizing f: every output pixel maps through inverse(f).
RemapField build_remap_field(const MobiusTransform& f, const GridDims& dims);

// Samples img at field coordinates. Horizontal sampling wraps modulo w,
// vertical sampling clamps to [0, h-1]. Channels are warped independently.
Grid warp_image(const Grid& img, const RemapField& field, Interp interp);

// Samples one channel at a continuous coordinate with horizontal wrap and
// vertical clamp; accepts unnormalized coordinates.
float sample_channel(const Grid& img, int channel, const PixelCoord& pc, Interp interp);

// Cache of built fields keyed by canonical Moebius coefficients plus grid
// dims; safe for concurrent readers with exclusive insertion.
class FieldCache {
public:
    std::shared_ptr<const RemapField> get_or_build(const MobiusTransform& f, const GridDims& dims);
    size_t size() const;
    void clear();

private:
    struct Impl;
    std::shared_ptr<Impl> impl_ = make_impl();
    static std::shared_ptr<Impl> make_impl();
};

// Process-wide cache used by the feature-grid transforms.
FieldCache& field_cache();

// Applies f to every channel of fg through the shared field cache.
Grid transform_features(const Grid& fg, const MobiusTransform& f, Interp interp = Interp::Bilinear);

// Equals transform_features(fg, inverse(f), interp).
Grid inverse_transform_features(const Grid& fg, const MobiusTransform& f, Interp interp = Interp::Bilinear);

} // namespace sphereview
