#pragma once

/// Closed-form scalar parameters of radial SLE_kappa and the associated CFT:
/// central charge, Kac weights, Coulomb charges, boundary decay exponents and
/// generator eigenvalues. Everything here is pure double-precision arithmetic;
/// all functions are thread-safe.

#include <stdexcept>

namespace rsle {

/// Central charge and the two weights that appear in every observable.
struct SleParameterSet {
    double kappa;
    double c;        // central charge
    double h12;      // weight h_{1;2} = (6-kappa)/(2 kappa)
    double h0half2;  // the combination 2*h_{0;1/2} = (6-kappa)(kappa-2)/(8 kappa)
};

/// Coulomb-gas charges: h(alpha) = alpha(alpha - 2 alpha0)/2.
struct CoulombChargeSet {
    double alpha_plus;   // sqrt(kappa/2)
    double alpha_minus;  // -2 sqrt(2/kappa)
    double alpha0;       // half the background charge: 2 alpha0 = alpha_+ + alpha_-
    double beta_kappa;   // sqrt(2/kappa), charge of the trace-creating boundary field

    double weight_of_charge(double alpha) const {
        return 0.5 * alpha * (alpha - 2.0 * alpha0);
    }
    /// Solve h = beta(beta - 2 alpha0)/2 for beta. `upper` selects the
    /// beta > alpha0 branch (the default downstream), `lower` the mirror
    /// 2 alpha0 - beta.
    enum class Branch { upper, lower };
    double charge_of_weight(double h, Branch branch = Branch::upper) const;
};

/// Exponents attached to a boundary weight h >= 0.
struct ExponentBundle {
    double kappa;
    double h;
    double delta_plus;   // roots of kappa d^2 + (4-kappa) d - 4h = 0
    double delta_minus;
    double two_Delta;    // 2*Delta(h) = h/2 + 2h_{0;1/2} + (kappa/8) delta_+
    double lambda;       // decay exponent: two_Delta - 2h_{0;1/2}
    double beta;         // boundary charge, beta > alpha0 branch: delta_+ = beta_kappa * beta
};

/// Bulk (dimension, spin) pair; fusion-consistent pairs have
/// d = 2h_{0;1/2} + (kappa/2) s^2.
struct SpinDimension {
    double d;
    double s;
};

/// c(kappa) = 1 - 6 (kappa-4)^2 / (4 kappa).  Throws std::domain_error for
/// kappa <= 0 or non-finite kappa.
double central_charge(double kappa);

/// Kac weight h_{r;s}(kappa) = [(r kappa - 4s)^2 - (kappa-4)^2] / (16 kappa).
double weight_rs(double kappa, double r, double s);

SleParameterSet sle_parameters(double kappa);

CoulombChargeSet coulomb_charges(double kappa);

/// All exponents for boundary weight h >= 0 at the given kappa.
ExponentBundle exponent_bundle(double kappa, double h);

/// Generator eigenvalue eps = 2h_{0;1/2} - d + (kappa/2) s^2; zero exactly on
/// fusion-consistent (d, s).
double eigenvalue_eps(double kappa, double d, double s);

/// Bulk charge balance: returns 2*alpha = 2*alpha0 - beta - beta_kappa.
double charge_balance(double kappa, double beta);

} // namespace rsle
