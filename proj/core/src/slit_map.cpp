#include "rsle/slit_map.hpp"

#include <cmath>
#include <stdexcept>

namespace rsle {

NormalizedHullMap::NormalizedHullMap(const SlitHull& hull) : hull_(hull) {
    if (hull.a == 0.0) throw std::domain_error("slit base must avoid the seed x0 = 0");
    if (!(hull.ell > 0.0)) throw std::domain_error("slit height must be positive");
    p0_ = raw(cplx(0.0, 0.0));
    const cplx gi = raw(cplx(0.0, 1.0));
    q1_ = gi - p0_;
    u_ = q1_.real();
    v_ = q1_.imag();
    A2_ = std::norm(q1_);
    if (!(v_ > 1e-12) || !(A2_ > 1e-12))
        throw std::domain_error("mobius normalizer is singular (slit too close to 0 or i)");
}

cplx NormalizedHullMap::s_branch(cplx z) const {
    const cplx w = z - hull_.a;
    const cplx r = hull_.ell / w;
    return w * std::sqrt(1.0 + r * r);
}

cplx NormalizedHullMap::raw(cplx z) const { return hull_.a + s_branch(z); }

cplx NormalizedHullMap::raw_d1(cplx z) const {
    const cplx w = z - hull_.a;
    return w / s_branch(z);
}

cplx NormalizedHullMap::raw_d2(cplx z) const {
    const cplx s = s_branch(z);
    return hull_.ell * hull_.ell / (s * s * s);
}

cplx NormalizedHullMap::raw_d3(cplx z) const {
    const cplx w = z - hull_.a;
    const cplx s = s_branch(z);
    return -3.0 * hull_.ell * hull_.ell * w / (s * s * s * s * s);
}

cplx NormalizedHullMap::mob_d1(cplx w) const {
    const cplx d = A2_ - u_ * w;
    return v_ * A2_ / (d * d);
}

cplx NormalizedHullMap::mob_d2(cplx w) const {
    const cplx d = A2_ - u_ * w;
    return 2.0 * u_ * v_ * A2_ / (d * d * d);
}

cplx NormalizedHullMap::mob_d3(cplx w) const {
    const cplx d = A2_ - u_ * w;
    return 6.0 * u_ * u_ * v_ * A2_ / (d * d * d * d);
}

cplx NormalizedHullMap::value(cplx z) const { return mob(raw(z) - p0_); }

cplx NormalizedHullMap::d1(cplx z) const {
    return mob_d1(raw(z) - p0_) * raw_d1(z);
}

cplx NormalizedHullMap::d2(cplx z) const {
    const cplx w = raw(z) - p0_;
    const cplx g1 = raw_d1(z);
    return mob_d2(w) * g1 * g1 + mob_d1(w) * raw_d2(z);
}

cplx NormalizedHullMap::d3(cplx z) const {
    const cplx w = raw(z) - p0_;
    const cplx g1 = raw_d1(z);
    return mob_d3(w) * g1 * g1 * g1 + 3.0 * mob_d2(w) * g1 * raw_d2(z) +
           mob_d1(w) * raw_d3(z);
}

cplx NormalizedHullMap::inverse(cplx y) const {
    // undo mobius, then g_A^{-1}(p) = a + sqrt((p-a)^2 - ell^2), branch
    // continuous off the image of the slit base
    const cplx p = mob_inv(y) + p0_;
    const cplx w = p - hull_.a;
    const cplx r = hull_.ell / w;
    return hull_.a + w * std::sqrt(1.0 - r * r);
}

cplx schwarzian(const NormalizedHullMap& map, cplx z) {
    const cplx f1 = map.d1(z);
    const double m1 = std::abs(f1);
    if (!std::isfinite(m1) || m1 < 1e-300)
        throw std::domain_error("schwarzian: phi' degenerate at z");
    return schwarzian_from(f1, map.d2(z), map.d3(z));
}

} // namespace rsle
