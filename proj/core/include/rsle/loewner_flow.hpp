#pragma once

/// Radial Loewner flow in the exterior-disc frame:
///
///     dg_t(z) = -g_t (g_t + U_t)/(g_t - U_t) dt,   g_0(z) = z,  U_t = e^{i xi_t},
///
/// integrated per driver step with U held at its left value and adaptive RK4
/// sub-steps inside the step. Also provides the log-derivative flow
///
///     d log g_t'(z) / dt = -(g^2 - 2 U g - U^2)/(g - U)^2,
///
/// trace reconstruction by the reverse flow, the half-plane conjugation
/// check, and the (sigma, rho) vector-field transport rules.
///
/// The rotated map h_t = U_t^{-1} g_t is exposed untranslated; the
/// boundary-anchored translation used elsewhere for bookkeeping carries no
/// numerical content.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "rsle/driving.hpp"
#include "rsle/geometry.hpp"

namespace rsle {

struct FlowConfig {
    double dt_base = 1e-3;      // maximum sub-step inside a driver step
    double eps_swallow = 1e-4;  // |g - U| at which a point counts as swallowed;
                                // with a piecewise-constant driver this is a
                                // resolution threshold fired on near passes
    enum class Integrator { rk4_adaptive } integrator = Integrator::rk4_adaptive;
    double dt_floor = 1e-9;     // singularity-cap underflow threshold
    double eps_lift = 1e-6;     // radial lift for trace reconstruction
};

enum class PointStatus { alive, swallowed };

struct TrackedPoint {
    cplx z0;
    cplx g;
    cplx log_deriv;
    PointStatus status = PointStatus::alive;
    double tau = 0.0;            // swallowing time, valid when swallowed
    bool floor_underflow = false;  // swallow was declared via dt_floor, not eps
};

/// State sampled at the driver grid times until swallowed or t_max.
struct PointTrajectory {
    std::vector<double> t;
    std::vector<cplx> g;
    std::vector<cplx> log_deriv;
    TrackedPoint final_state;
};

struct RadialTrace {
    std::vector<double> times;
    std::vector<cplx> gamma;
};

/// Integrate g and log g' for one starting point. Boundary points
/// (|z0| = 1) are renormalized to the circle after every driver step.
PointTrajectory evolve_point(cplx z0, const DrivingPath& path, const FlowConfig& cfg);

/// Convenience view of evolve_point returning only log g_t'.
std::vector<cplx> evolve_log_derivative(cplx z0, const DrivingPath& path,
                                        const FlowConfig& cfg);

/// Rotated-frame map h_t = U_t^{-1} g_t; |h'| = |g'|.
inline cplx h_map(cplx g, cplx U) { return g / U; }

/// gamma(t) by the reverse flow started at U_t (1 + eps_lift).
cplx trace_point(double t, const DrivingPath& path, const FlowConfig& cfg);

/// Trace sampled at n_points uniform times in (0, t_max].
RadialTrace radial_trace(const DrivingPath& path, const FlowConfig& cfg,
                         std::size_t n_points);

/// Pathwise check of the half-plane conjugation: the disc flow mapped through
/// the frame map must satisfy d gt = (1+gt^2)/2 (1+p gt)/(gt - p) dt with
/// p_t = -tan(xi_t/2). Returns the largest per-unit-time defect over the path
/// for a tracked half-plane point w0, or nullopt if |xi| approached pi and the
/// window was skipped.
struct HalfPlaneCheck {
    double max_residual_rate = 0.0;  // |mismatch| / dt, worst driver step
    bool skipped = false;            // |xi| got too close to pi
};
HalfPlaneCheck to_half_plane_check(cplx w0, const DrivingPath& path,
                                   const FlowConfig& cfg, double xi_guard = 2.9);

/// Scalar analytic field with derivative, used by the transport rules.
struct AnalyticField {
    std::function<cplx(cplx)> value;
    std::function<cplx(cplx)> derivative;
};

/// Conformal map with two derivatives.
struct ConformalMap2 {
    std::function<cplx(cplx)> value;
    std::function<cplx(cplx)> d1;
    std::function<cplx(cplx)> d2;
};

/// Transported pair evaluated at source points: sigma_at(z) = sigma^phi(phi(z))
/// and rho_at(z) = rho^phi(phi(z)), with
///   rho^phi . phi = phi' rho,   sigma^phi . phi = phi' sigma + (kappa/2) phi'' rho^2.
struct TransportedFields {
    std::function<cplx(cplx)> sigma_at;
    std::function<cplx(cplx)> rho_at;
    std::function<cplx(cplx)> rho_prime_at;  // (rho^phi)'(phi(z))
};

TransportedFields transport_vector_field(const AnalyticField& sigma,
                                         const AnalyticField& rho,
                                         const ConformalMap2& phi, double kappa);

} // namespace rsle
