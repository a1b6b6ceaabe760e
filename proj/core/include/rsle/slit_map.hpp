#pragma once

/// Closed-form uniformizer of the upper half plane minus a vertical slit
/// A = [a, a + i ell], normalized to fix both marked points of the frame:
/// phi_A(0) = 0 and phi_A(i) = i. The raw map is
///
///     g_A(z) = a + (z-a) sqrt(1 + ell^2/(z-a)^2),
///
/// whose principal-branch cut is exactly the slit; it is real and increasing
/// on the real axis away from the slit. A half-plane Mobius automorphism then
/// pins (g_A(0), g_A(i)) back to (0, i). Derivatives through third order are
/// closed-form.

#include <complex>

#include "rsle/geometry.hpp"
#include "rsle/power_series.hpp"

namespace rsle {

struct SlitHull {
    double a = 1.0;    // real base point, != 0
    double ell = 0.5;  // slit height, > 0
};

class NormalizedHullMap {
public:
    NormalizedHullMap(const SlitHull& hull);

    const SlitHull& hull() const { return hull_; }

    // raw slit map and derivatives
    cplx raw(cplx z) const;
    cplx raw_d1(cplx z) const;
    cplx raw_d2(cplx z) const;
    cplx raw_d3(cplx z) const;

    // normalized map phi_A = mobius . raw and derivatives
    cplx value(cplx z) const;
    cplx d1(cplx z) const;
    cplx d2(cplx z) const;
    cplx d3(cplx z) const;

    /// Taylor coefficients of phi_A around a real center (used to seed the
    /// transported flow).
    template <int N>
    Series<N> taylor(cplx center) const;

    /// Inverse map (half plane onto the slit complement).
    cplx inverse(cplx w) const;

private:
    SlitHull hull_;
    cplx p0_;   // g_A(0)
    cplx q1_;   // g_A(i) - g_A(0)
    double u_ = 0.0, v_ = 0.0, A2_ = 0.0;  // mobius data: q1 = u+iv, A2 = |q1|^2

    cplx s_branch(cplx z) const;  // (z-a) sqrt(1 + (ell/(z-a))^2)
    cplx mob(cplx w) const { return v_ * w / (A2_ - u_ * w); }
    cplx mob_d1(cplx w) const;
    cplx mob_d2(cplx w) const;
    cplx mob_d3(cplx w) const;
    cplx mob_inv(cplx y) const { return A2_ * y / (v_ + u_ * y); }
};

/// Schwarzian derivative from three derivative values.
inline cplx schwarzian_from(cplx f1, cplx f2, cplx f3) {
    const cplx r = f2 / f1;
    return f3 / f1 - 1.5 * r * r;
}

/// S(phi)(z) = phi'''/phi' - (3/2)(phi''/phi')^2. Throws if phi'(z) = 0.
cplx schwarzian(const NormalizedHullMap& map, cplx z);

template <int N>
Series<N> NormalizedHullMap::taylor(cplx center) const {
    // raw map as a series: a + sqrt((z-a)^2 + ell^2) with the branch that is
    // continuous off the slit
    Series<N> w = Series<N>::identity(center - hull_.a);
    Series<N> s2 = w * w + Series<N>::constant(hull_.ell * hull_.ell);
    const cplx root0 = s_branch(center) ;
    Series<N> s = series_sqrt(s2, root0);
    Series<N> raw = s;
    raw[0] += hull_.a;
    // mobius: v w / (A2 - u w) applied to (raw - p0)
    Series<N> num = raw;
    num[0] -= p0_;
    Series<N> den = Series<N>::constant(A2_) - u_ * num;
    return v_ * (num * series_recip(den));
}

} // namespace rsle
