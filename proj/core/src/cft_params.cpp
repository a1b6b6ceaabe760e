#include "rsle/cft_params.hpp"

#include <cmath>

namespace rsle {

namespace {
void require_kappa(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw std::domain_error("kappa must be a positive finite real");
}
} // namespace

double central_charge(double kappa) {
    require_kappa(kappa);
    const double d = kappa - 4.0;
    return 1.0 - 6.0 * d * d / (4.0 * kappa);
}

double weight_rs(double kappa, double r, double s) {
    require_kappa(kappa);
    const double a = r * kappa - 4.0 * s;
    const double b = kappa - 4.0;
    return (a * a - b * b) / (16.0 * kappa);
}

SleParameterSet sle_parameters(double kappa) {
    require_kappa(kappa);
    SleParameterSet p;
    p.kappa = kappa;
    p.c = central_charge(kappa);
    p.h12 = (6.0 - kappa) / (2.0 * kappa);
    p.h0half2 = (6.0 - kappa) * (kappa - 2.0) / (8.0 * kappa);
    return p;
}

CoulombChargeSet coulomb_charges(double kappa) {
    require_kappa(kappa);
    CoulombChargeSet c;
    c.alpha_plus = std::sqrt(kappa / 2.0);
    c.alpha_minus = -2.0 * std::sqrt(2.0 / kappa);
    c.alpha0 = 0.5 * (c.alpha_plus + c.alpha_minus);
    c.beta_kappa = std::sqrt(2.0 / kappa);
    return c;
}

double CoulombChargeSet::charge_of_weight(double h, Branch branch) const {
    const double disc = alpha0 * alpha0 + 2.0 * h;
    if (disc < 0.0)
        throw std::domain_error("weight below the minimum attainable alpha0^2/2");
    const double root = std::sqrt(disc);
    return branch == Branch::upper ? alpha0 + root : alpha0 - root;
}

ExponentBundle exponent_bundle(double kappa, double h) {
    require_kappa(kappa);
    if (h < 0.0 || !std::isfinite(h))
        throw std::domain_error("boundary weight h must be >= 0");
    ExponentBundle e;
    e.kappa = kappa;
    e.h = h;
    const double km4 = kappa - 4.0;
    const double root = std::sqrt(km4 * km4 + 16.0 * h * kappa);
    e.delta_plus = (km4 + root) / (2.0 * kappa);
    e.delta_minus = (km4 - root) / (2.0 * kappa);
    const double h0h2 = (6.0 - kappa) * (kappa - 2.0) / (8.0 * kappa);
    e.two_Delta = 0.5 * h + h0h2 + kappa / 8.0 * e.delta_plus;
    e.lambda = e.two_Delta - h0h2;
    e.beta = coulomb_charges(kappa).charge_of_weight(h);
    return e;
}

double eigenvalue_eps(double kappa, double d, double s) {
    require_kappa(kappa);
    const double h0h2 = (6.0 - kappa) * (kappa - 2.0) / (8.0 * kappa);
    return h0h2 - d + 0.5 * kappa * s * s;
}

double charge_balance(double kappa, double beta) {
    const CoulombChargeSet c = coulomb_charges(kappa);
    return 2.0 * c.alpha0 - beta - c.beta_kappa;
}

} // namespace rsle
