#include "sphereview/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sphereview {

namespace {

constexpr double kAxisTol = 1e-6;

void require_unit(const UnitVector3& v, const char* what) {
    double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (std::abs(n - 1.0) > kAxisTol)
        throw std::invalid_argument(std::string(what) + ": vector must be unit length");
}

} // namespace

MobiusTransform::MobiusTransform(std::complex<double> a, std::complex<double> b,
                                 std::complex<double> c, std::complex<double> d)
    : a_(a), b_(b), c_(c), d_(d) {
    normalize();
}

void MobiusTransform::normalize() {
    std::complex<double> det = a_ * d_ - b_ * c_;
    if (std::abs(det) < 1e-300)
        throw std::invalid_argument("MobiusTransform: determinant must be nonzero");
    std::complex<double> s = std::sqrt(det);
    a_ /= s; b_ /= s; c_ /= s; d_ /= s;

    const std::complex<double>* coeffs[] = {&a_, &b_, &c_, &d_};
    for (const std::complex<double>* c : coeffs) {
        if (std::abs(*c) <= 1e-12) continue;
        double re = c->real();
        bool flip = re < -1e-12 || (std::abs(re) <= 1e-12 && c->imag() < 0.0);
        if (flip) { a_ = -a_; b_ = -b_; c_ = -c_; d_ = -d_; }
        break;
    }
}

MobiusTransform MobiusTransform::rotation(const UnitVector3& axis, double angle) {
    require_unit(axis, "rotation");
    double hc = std::cos(angle * 0.5);
    double hs = std::sin(angle * 0.5);
    std::complex<double> a(hc, axis.z * hs);
    std::complex<double> b(-axis.y * hs, axis.x * hs);
    return MobiusTransform(a, b, -std::conj(b), std::conj(a));
}

MobiusTransform MobiusTransform::zoom(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("zoom: rho must be positive and finite");
    return MobiusTransform({rho, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0});
}

MobiusTransform MobiusTransform::zoom_about(const UnitVector3& center, double rho) {
    require_unit(center, "zoom_about");
    double s = std::sqrt(center.x * center.x + center.y * center.y);
    MobiusTransform r;
    if (s < 1e-12) {
        // center is a pole: south needs no rotation, north needs a half turn.
        if (center.z > 0.0) r = rotation({1.0, 0.0, 0.0}, std::numbers::pi);
    } else {
        // axis = center x (0, 0, -1), angle = acos(center . (0, 0, -1))
        UnitVector3 axis{-center.y / s, center.x / s, 0.0};
        double angle = std::acos(std::clamp(-center.z, -1.0, 1.0));
        r = rotation(axis, angle);
    }
    return compose(inverse(r), compose(zoom(rho), r));
}

MobiusTransform compose(const MobiusTransform& f, const MobiusTransform& g) {
    return MobiusTransform(f.a_ * g.a_ + f.b_ * g.c_, f.a_ * g.b_ + f.b_ * g.d_,
                           f.c_ * g.a_ + f.d_ * g.c_, f.c_ * g.b_ + f.d_ * g.d_);
}

MobiusTransform inverse(const MobiusTransform& f) {
    return MobiusTransform(f.d_, -f.b_, -f.c_, f.a_);
}

PlanePoint apply(const MobiusTransform& f, const PlanePoint& z) {
    return {f.a() * z.p + f.b() * z.q, f.c() * z.p + f.d() * z.q};
}

UnitVector3 apply_on_sphere(const MobiusTransform& f, const UnitVector3& v) {
    return inverse_stereographic(apply(f, stereographic(v)));
}

bool approx_equal(const MobiusTransform& f, const MobiusTransform& g, double tol) {
    auto dist = [&](double sign) {
        return std::abs(f.a() - sign * g.a()) + std::abs(f.b() - sign * g.b()) +
               std::abs(f.c() - sign * g.c()) + std::abs(f.d() - sign * g.d());
    };
    return std::min(dist(1.0), dist(-1.0)) <= tol;
}

} // namespace sphereview
