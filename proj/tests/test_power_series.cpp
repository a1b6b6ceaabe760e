#include <doctest.h>

#include <cmath>
#include <complex>

#include "rsle/power_series.hpp"

using namespace rsle;
using S = Series<8>;
using C = std::complex<double>;

TEST_CASE("series arithmetic against closed forms") {
    // x = 1 + u: recip is the alternating geometric series
    S x = S::identity(1.0);
    const S r = series_recip(x);
    for (int k = 0; k <= 8; ++k)
        CHECK(std::abs(r[k] - C(k % 2 ? -1.0 : 1.0)) < 1e-14);

    // sqrt(1+u)^2 == 1+u
    const S s = series_sqrt(x, 1.0);
    const S sq = s * s;
    for (int k = 0; k <= 8; ++k) CHECK(std::abs(sq[k] - x[k]) < 1e-13);
}

TEST_CASE("compose and invert") {
    // a(u) = u/(1-u) has inverse u/(1+u)
    S a;
    for (int k = 1; k <= 8; ++k) a[k] = 1.0;
    const S g = series_invert(a);
    for (int k = 1; k <= 8; ++k) {
        const double expect = (k == 1) ? 1.0 : ((k == 2) ? -1.0 : 0.0);
        // u/(1+u) = u - u^2 + u^3 - ...
        CHECK(std::abs(g[k] - C(k % 2 ? 1.0 : -1.0)) < 1e-12);
        (void)expect;
    }
    const S check = series_compose(a, g);
    CHECK(std::abs(check[0]) < 1e-13);
    CHECK(std::abs(check[1] - 1.0) < 1e-12);
    for (int k = 2; k <= 8; ++k) CHECK(std::abs(check[k]) < 1e-11);
}

TEST_CASE("taylor shift recenters polynomials exactly") {
    // p(u) = (1+u)^3, coefficients at u=0: 1,3,3,1
    S p;
    p[0] = 1;
    p[1] = 3;
    p[2] = 3;
    p[3] = 1;
    const S q = series_shift(p, 1.0);  // (2+u)^3 = 8 + 12u + 6u^2 + u^3
    CHECK(std::abs(q[0] - 8.0) < 1e-13);
    CHECK(std::abs(q[1] - 12.0) < 1e-13);
    CHECK(std::abs(q[2] - 6.0) < 1e-13);
    CHECK(std::abs(q[3] - 1.0) < 1e-13);
}

TEST_CASE("eval matches horner on random-ish data") {
    S p;
    for (int k = 0; k <= 8; ++k) p[k] = C(0.3 * k - 1.0, 0.1 * k);
    const C u(0.2, -0.1);
    C ref = 0.0, pw = 1.0;
    for (int k = 0; k <= 8; ++k) {
        ref += p[k] * pw;
        pw *= u;
    }
    CHECK(std::abs(p.eval(u) - ref) < 1e-13);
}

TEST_CASE("derivative") {
    S p;
    p[2] = 1.0;  // u^2
    const S d = series_derivative(p);
    CHECK(std::abs(d[1] - 2.0) < 1e-15);
    CHECK(std::abs(d[0]) < 1e-15);
}
