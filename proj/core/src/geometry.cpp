#include "sphereview/geometry.hpp"

#include <cmath>
#include <numbers>

namespace sphereview {

namespace {
constexpr double kPi = std::numbers::pi;
}

double wrap_u(double u, int w) {
    double r = std::fmod(u, static_cast<double>(w));
    if (r < 0.0) r += w;
    if (r >= w) r -= w; // fmod result + w can round up to exactly w
    return r + 0.0;     // canonicalizes -0.0
}

SphericalPoint erp_to_sphere(const PixelCoord& pix, const GridDims& dims) {
    require_erp(dims, "erp_to_sphere");
    // Algebraically ((u+0.5)/w - 0.5)*2*pi, arranged so that integer rows v
    // and h-1-v produce bitwise-opposite latitudes.
    double lon = (2.0 * pix.u + 1.0 - dims.w) * (kPi / dims.w);
    double lat = (dims.h - 1.0 - 2.0 * pix.v) * (kPi / (2.0 * dims.h));
    return {lon, lat};
}

PixelCoord sphere_to_erp(const SphericalPoint& sp, const GridDims& dims) {
    require_erp(dims, "sphere_to_erp");
    double u = wrap_u(sp.lon * dims.w / (2.0 * kPi) + (dims.w - 1.0) * 0.5, dims.w);
    double v = (dims.h - 1.0) * 0.5 - sp.lat * dims.h / kPi;
    return {u, v};
}

UnitVector3 sphere_to_cartesian(const SphericalPoint& sp) {
    double cl = std::cos(sp.lat);
    return {cl * std::cos(sp.lon), cl * std::sin(sp.lon), std::sin(sp.lat)};
}

SphericalPoint cartesian_to_sphere(const UnitVector3& v) {
    double norm2 = v.x * v.x + v.y * v.y + v.z * v.z;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6)
        throw std::invalid_argument("cartesian_to_sphere: input vector is not unit length");
    double lon = std::atan2(v.y, v.x);
    if (lon >= kPi) lon -= 2.0 * kPi; // atan2 may return exactly +pi
    double lat = std::atan2(v.z, std::sqrt(v.x * v.x + v.y * v.y));
    return {lon, lat};
}

PlanePoint stereographic(const UnitVector3& v) {
    double q = 1.0 - v.z;
    if (q <= 0.0) return PlanePoint::infinity();
    return {{v.x, v.y}, {q, 0.0}};
}

UnitVector3 inverse_stereographic(const PlanePoint& z) {
    double pp = std::norm(z.p);
    double qq = std::norm(z.q);
    double n = pp + qq;
    if (n == 0.0) throw std::invalid_argument("inverse_stereographic: degenerate pair (0, 0)");
    std::complex<double> pq = z.p * std::conj(z.q);
    return {2.0 * pq.real() / n, 2.0 * pq.imag() / n, (pp - qq) / n};
}

} // namespace sphereview
