#pragma once

/// Fixed-order truncated power series over complex coefficients. Small and
/// allocation-free; order is a compile-time constant. Used by the restriction
/// flow to transport Taylor jets through exact one-step maps.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace rsle {

template <int N>
struct Series {
    static_assert(N >= 2);
    std::array<std::complex<double>, N + 1> a{};

    using C = std::complex<double>;

    static Series constant(C v) {
        Series s;
        s.a[0] = v;
        return s;
    }
    static Series identity(C v0 = 0.0) {
        Series s;
        s.a[0] = v0;
        s.a[1] = 1.0;
        return s;
    }

    C operator[](int k) const { return a[static_cast<std::size_t>(k)]; }
    C& operator[](int k) { return a[static_cast<std::size_t>(k)]; }

    C eval(C u) const {
        C acc = a[N];
        for (int k = N - 1; k >= 0; --k) acc = acc * u + a[static_cast<std::size_t>(k)];
        return acc;
    }

    Series& operator+=(const Series& o) {
        for (int k = 0; k <= N; ++k) a[k] += o.a[k];
        return *this;
    }
    Series& operator-=(const Series& o) {
        for (int k = 0; k <= N; ++k) a[k] -= o.a[k];
        return *this;
    }
    friend Series operator+(Series x, const Series& y) { return x += y; }
    friend Series operator-(Series x, const Series& y) { return x -= y; }
    friend Series operator*(C s, Series x) {
        for (auto& c : x.a) c *= s;
        return x;
    }

    friend Series operator*(const Series& x, const Series& y) {
        Series out;
        for (int k = 0; k <= N; ++k) {
            std::complex<double> acc = 0.0;
            for (int j = 0; j <= k; ++j) acc += x.a[j] * y.a[k - j];
            out.a[k] = acc;
        }
        return out;
    }
};

/// 1 / x, requires x[0] != 0.
template <int N>
Series<N> series_recip(const Series<N>& x) {
    if (x.a[0] == std::complex<double>(0.0))
        throw std::domain_error("series_recip: zero constant term");
    Series<N> out;
    out.a[0] = 1.0 / x.a[0];
    for (int k = 1; k <= N; ++k) {
        std::complex<double> acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += x.a[j] * out.a[k - j];
        out.a[k] = -acc / x.a[0];
    }
    return out;
}

/// sqrt(x) with the branch fixed by root0 (root0^2 == x[0]).
template <int N>
Series<N> series_sqrt(const Series<N>& x, std::complex<double> root0) {
    Series<N> out;
    out.a[0] = root0;
    if (root0 == std::complex<double>(0.0))
        throw std::domain_error("series_sqrt: branch value must be nonzero");
    for (int k = 1; k <= N; ++k) {
        std::complex<double> acc = 0.0;
        for (int j = 1; j < k; ++j) acc += out.a[j] * out.a[k - j];
        out.a[k] = (x.a[k] - acc) / (2.0 * root0);
    }
    return out;
}

/// x(y(u)) for y with zero constant term.
template <int N>
Series<N> series_compose(const Series<N>& x, const Series<N>& y) {
    if (std::abs(y.a[0]) > 1e-12)
        throw std::domain_error("series_compose: inner constant term must vanish");
    Series<N> inner = y;
    inner.a[0] = 0.0;
    Series<N> out = Series<N>::constant(x.a[0]);
    Series<N> pw = Series<N>::constant(1.0);
    for (int j = 1; j <= N; ++j) {
        pw = pw * inner;
        out += x.a[j] * pw;
    }
    return out;
}

/// Compositional inverse g of x (x[0] = 0, x[1] != 0): x(g(u)) = u.
template <int N>
Series<N> series_invert(const Series<N>& x) {
    if (std::abs(x.a[0]) > 1e-12 || x.a[1] == std::complex<double>(0.0))
        throw std::domain_error("series_invert: needs x(0)=0, x'(0)!=0");
    Series<N> g;
    g.a[1] = 1.0 / x.a[1];
    for (int m = 2; m <= N; ++m) {
        const Series<N> xg = series_compose(x, g);
        g.a[m] = -xg.a[m] / x.a[1];
    }
    return g;
}

/// Taylor re-centering: coefficients of x(d + u) (drops what truncation drops).
template <int N>
Series<N> series_shift(const Series<N>& x, std::complex<double> d) {
    Series<N> out = x;
    // repeated synthetic division by (u - d): Horner-style Taylor shift
    for (int j = 0; j < N; ++j)
        for (int k = N - 1; k >= j; --k) out.a[k] += d * out.a[k + 1];
    return out;
}

/// Derivative.
template <int N>
Series<N> series_derivative(const Series<N>& x) {
    Series<N> out;
    for (int k = 0; k < N; ++k) out.a[k] = static_cast<double>(k + 1) * x.a[k + 1];
    return out;
}

} // namespace rsle
