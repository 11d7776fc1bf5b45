#pragma once

#include <complex>

#include "sphereview/grid.hpp"

namespace sphereview {

// Angular position on the viewing sphere. lon in [-pi, pi), lat in [-pi/2, pi/2].
struct SphericalPoint {
    double lon = 0.0;
    double lat = 0.0;
};

struct UnitVector3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Continuous pixel coordinates; integer u, v address pixel centers, so the
// sample at column j row i is PixelCoord{double(j), double(i)}.
struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

// Point of the extended complex plane as a homogeneous pair representing p/q.
// (p, q) != (0, 0); infinity is encoded as q == 0. Keeping the pair avoids
// overflow near the projection pole and lets Moebius transforms act by plain
// matrix multiplication.
struct PlanePoint {
    std::complex<double> p{0.0, 0.0};
    std::complex<double> q{1.0, 0.0};

    static PlanePoint from_complex(std::complex<double> z) { return {z, {1.0, 0.0}}; }
    static PlanePoint infinity() { return {{1.0, 0.0}, {0.0, 0.0}}; }
    bool is_infinity() const { return q == std::complex<double>(0.0, 0.0); }
    // Finite value p/q; caller must ensure !is_infinity().
    std::complex<double> value() const { return p / q; }
};

// Wraps a continuous column coordinate into [0, w).
double wrap_u(double u, int w);

// ERP pixel-center convention: column u maps to lon ((u+0.5)/w - 0.5)*2*pi,
// row v maps to lat (0.5 - (v+0.5)/h)*pi. The image center is (0, 0) and
// row 0 is the north edge. Rows v and h-1-v give exactly opposite latitudes.
SphericalPoint erp_to_sphere(const PixelCoord& pix, const GridDims& dims);

// Exact inverse of erp_to_sphere; u is wrapped into [0, w), v is left
// unclamped so the result stays analytic near the poles (v in [-0.5, h-0.5]).
PixelCoord sphere_to_erp(const SphericalPoint& sp, const GridDims& dims);

// x = cos(lat)cos(lon), y = cos(lat)sin(lon), z = sin(lat).
UnitVector3 sphere_to_cartesian(const SphericalPoint& sp);

// Inverse of sphere_to_cartesian; rejects inputs whose norm deviates from 1
// by more than 1e-6.
SphericalPoint cartesian_to_sphere(const UnitVector3& v);

// Stereographic projection from the north pole N = (0,0,1):
// (x, y, z) -> (x + iy)/(1 - z), with N itself mapping to infinity.
PlanePoint stereographic(const UnitVector3& v);

// Inverse stereographic projection; infinity maps back to N.
UnitVector3 inverse_stereographic(const PlanePoint& z);

} // namespace sphereview
