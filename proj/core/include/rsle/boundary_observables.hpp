#pragma once

/// Boundary-point dynamics in angle coordinates. With theta = arg(g_t/U_t)
/// the flow induces the SDE
///
///     d theta = cot(theta/2) dt - d xi,
///
/// the sign of the noise being fixed by the pathwise match with the complex
/// flow. Along a trajectory log|g_t'| decreases at rate 1/(2 sin^2(theta/2)),
/// which supplies the Feynman-Kac weight for the derivative moments
/// f_h(theta0, t) = E[ |g_t'|^h, point still alive ].

#include <cstdint>
#include <functional>
#include <vector>

#include "rsle/driving.hpp"
#include "rsle/estimate.hpp"

namespace rsle {

struct AngleState {
    double theta = 0.0;         // in (0, 2 pi) while alive
    double fk_log_weight = 0.0; // log of exp[-h int ds / (2 sin^2(theta/2))], <= 0
    bool alive = true;
    double tau = 0.0;           // kill time, valid when !alive
};

struct AngleConfig {
    double theta_cut = 1e-3;      // kill boundary: exit of (cut, 2pi - cut)
    double substep_sin = 0.1;     // sub-step the drift when sin(theta/2) < this
    double dt_floor = 1e-12;
};

/// One Euler-Maruyama driver step of size dt with noise increment dxi: the
/// drift is integrated with Euler sub-steps scaled by sin^2(theta/2) below the
/// substep_sin threshold, accumulating the Feynman-Kac integrand at the
/// sub-step midpoint; the noise is applied once at the end of the step.
void theta_step(AngleState& state, double dxi, double dt, double h,
                const AngleConfig& cfg, double t_now);

/// f_h estimates at the requested times over n_samples independent drivers.
std::vector<Estimate> estimate_f_h(double kappa, double h, double theta0,
                                   const std::vector<double>& t_list, double t_max,
                                   double dt, std::size_t n_samples, uint64_t seed,
                                   const AngleConfig& cfg = {}, unsigned workers = 1);

struct LambdaFit {
    double lambda_hat = 0.0;
    double stderr_ = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

/// Weighted least-squares slope of -log(mean) against t over the given
/// window; weights are (mean/stderr)^2. Throws if fewer than three window
/// points have positive means.
LambdaFit fit_lambda(const std::vector<double>& t_list,
                     const std::vector<Estimate>& estimates, double window_lo,
                     double window_hi);

struct GridFunction {
    double theta_min = 0.0;      // grid covers [theta_min, 2pi - theta_min]
    double dtheta = 0.0;
    std::vector<double> values;  // uniform grid, values[i] at theta_min + i*dtheta

    double theta_at(std::size_t i) const { return theta_min + dtheta * static_cast<double>(i); }
};

/// Apply (kappa/2) d^2/dtheta^2 + cot(theta/2) d/dtheta - h/(2 sin^2(theta/2))
/// by second-order central differences; the output grid drops both endpoints.
GridFunction apply_calogero(const GridFunction& fn, double kappa, double h);

struct GeneratorCheck {
    double mc_increment = 0.0;      // E[phi(theta_t) e^FK] - phi(theta0)
    double mc_stderr = 0.0;
    double generator_value = 0.0;   // t * (H_h phi)(theta0), finite differences
    double discrepancy = 0.0;       // |mc_increment - generator_value|
    double band = 0.0;              // 3 stderr + C t^2 allowance
    bool within_band = false;
};

/// Short-time generator test: E[phi(theta_t) e^FK] - phi(theta0) should equal
/// t (H_h phi)(theta0) + O(t^2) for smooth phi. The generator value is formed
/// from 5-point finite differences of phi.
GeneratorCheck generator_consistency(double kappa, double h, double theta0, double t,
                                     double dt, std::size_t n_samples, uint64_t seed,
                                     const std::function<double(double)>& phi,
                                     unsigned workers = 1);

} // namespace rsle
