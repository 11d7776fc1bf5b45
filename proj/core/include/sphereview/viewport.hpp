#pragma once

#include "sphereview/geometry.hpp"
#include "sphereview/grid.hpp"

namespace sphereview {

// Gnomonic viewport: perspective image on the plane tangent to the sphere at
// `viewpoint`, zero roll (camera up follows the local meridian toward north).
struct ViewportSpec {
    SphericalPoint viewpoint{};
    double fovh = 0.0; // radians, strictly inside (0, pi)
    double fovv = 0.0;
    int out_w = 0;
    int out_h = 0;
};

void validate(const ViewportSpec& spec);

// Continuous ERP source coordinates for every viewport pixel; row-major
// out_h x out_w. Separated from sampling so the geometry can be checked
// against reference formulas without resampling error.
std::vector<PixelCoord> viewport_source_coords(const ViewportSpec& spec, const GridDims& img_dims);

// Samples img at the viewport coordinates; output is out_h x out_w with the
// input channel count (not an ERP grid).
Grid extract_viewport(const Grid& img, const ViewportSpec& spec, Interp interp);

} // namespace sphereview
