#include "sphereview/viewport.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sphereview/remap.hpp"

namespace sphereview {

void validate(const ViewportSpec& spec) {
    constexpr double kPi = std::numbers::pi;
    if (!(spec.fovh > 0.0 && spec.fovh < kPi) || !(spec.fovv > 0.0 && spec.fovv < kPi))
        throw std::invalid_argument("ViewportSpec: fields of view must lie strictly inside (0, pi)");
    if (spec.out_w <= 0 || spec.out_h <= 0)
        throw std::invalid_argument("ViewportSpec: output size must be positive");
}

std::vector<PixelCoord> viewport_source_coords(const ViewportSpec& spec, const GridDims& img_dims) {
    validate(spec);
    require_erp(img_dims, "viewport_source_coords");

    double lon = spec.viewpoint.lon, lat = spec.viewpoint.lat;
    double sl = std::sin(lon), cl = std::cos(lon);
    double sp = std::sin(lat), cp = std::cos(lat);
    // Tangent-plane frame at the viewpoint: east, up (toward north), normal.
    UnitVector3 e{-sl, cl, 0.0};
    UnitVector3 u{-sp * cl, -sp * sl, cp};
    UnitVector3 n{cp * cl, cp * sl, sp};

    double half_w = std::tan(spec.fovh * 0.5);
    double half_h = std::tan(spec.fovv * 0.5);

    std::vector<PixelCoord> coords(static_cast<size_t>(spec.out_w) * spec.out_h);
    for (int row = 0; row < spec.out_h; ++row) {
        double y = (0.5 - (row + 0.5) / spec.out_h) * 2.0 * half_h;
        for (int col = 0; col < spec.out_w; ++col) {
            double x = ((col + 0.5) / spec.out_w - 0.5) * 2.0 * half_w;
            UnitVector3 d{n.x + x * e.x + y * u.x,
                          n.y + x * e.y + y * u.y,
                          n.z + x * e.z + y * u.z};
            double len = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
            d.x /= len; d.y /= len; d.z /= len;
            coords[static_cast<size_t>(row) * spec.out_w + col] =
                sphere_to_erp(cartesian_to_sphere(d), img_dims);
        }
    }
    return coords;
}

Grid extract_viewport(const Grid& img, const ViewportSpec& spec, Interp interp) {
    std::vector<PixelCoord> coords = viewport_source_coords(spec, img.dims());
    Grid out({spec.out_w, spec.out_h}, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        float* dst = out.plane(c);
        for (size_t k = 0; k < coords.size(); ++k)
            dst[k] = sample_channel(img, c, coords[k], interp);
    }
    return out;
}

} // namespace sphereview
