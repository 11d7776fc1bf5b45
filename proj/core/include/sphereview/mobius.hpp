#pragma once

#include <complex>

#include "sphereview/geometry.hpp"

namespace sphereview {

// Moebius transform f(z) = (az + b)/(cz + d) with ad - bc != 0, stored
// normalized: coefficients are divided by a square root of the determinant
// (so ad - bc = 1) and the residual matrix sign is canonicalized by making
// the first coefficient of magnitude > 1e-12, in (a, b, c, d) order, have
// non-negative real part (non-negative imaginary part when the real part
// vanishes). Canonical coefficients make equality tests and cache keys
// deterministic; the two matrix signs represent the same transform.
class MobiusTransform {
public:
    MobiusTransform() : a_(1.0), b_(0.0), c_(0.0), d_(1.0) {}
    MobiusTransform(std::complex<double> a, std::complex<double> b,
                    std::complex<double> c, std::complex<double> d);

    static MobiusTransform identity() { return MobiusTransform(); }

    // Elliptic instance realizing the right-hand-rule rotation by `angle`
    // about `axis` = (l, m, n): a = cos(t/2) + i n sin(t/2),
    // b = (-m + i l) sin(t/2), c = -conj(b), d = conj(a).
    static MobiusTransform rotation(const UnitVector3& axis, double angle);

    // Hyperbolic instance f(z) = rho z; fixes 0 and infinity, i.e. the south
    // and north poles. rho > 1 magnifies around the plane origin.
    static MobiusTransform zoom(double rho);

    // inverse(R) * zoom(rho) * R where R is the minimal-angle rotation taking
    // `center` to the south pole (0, 0, -1); fixes `center` and its antipode.
    static MobiusTransform zoom_about(const UnitVector3& center, double rho);

    std::complex<double> a() const { return a_; }
    std::complex<double> b() const { return b_; }
    std::complex<double> c() const { return c_; }
    std::complex<double> d() const { return d_; }

    bool is_identity() const {
        return a_ == std::complex<double>(1.0) && b_ == std::complex<double>(0.0) &&
               c_ == std::complex<double>(0.0) && d_ == std::complex<double>(1.0);
    }

    friend MobiusTransform compose(const MobiusTransform& f, const MobiusTransform& g);
    friend MobiusTransform inverse(const MobiusTransform& f);

private:
    void normalize();
    std::complex<double> a_, b_, c_, d_;
};

// apply(compose(f, g), z) == apply(f, apply(g, z)).
MobiusTransform compose(const MobiusTransform& f, const MobiusTransform& g);
MobiusTransform inverse(const MobiusTransform& f);

// Homogeneous action (p, q) -> (ap + bq, cp + dq); total on the extended
// plane, never yields (0, 0).
PlanePoint apply(const MobiusTransform& f, const PlanePoint& z);

// Conjugated sphere action SP^-1(f(SP(v))).
UnitVector3 apply_on_sphere(const MobiusTransform& f, const UnitVector3& v);

// True when the coefficient matrices agree up to overall sign within tol.
bool approx_equal(const MobiusTransform& f, const MobiusTransform& g, double tol);

} // namespace sphereview
