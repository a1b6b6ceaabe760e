#pragma once

/// Exact one-step maps of the radial Loewner flow with the driver held
/// constant. In the exterior-disc frame with driver U the flow
/// dg = -g (g+U)/(g-U) dt has the first integral
///
///     e^t (g/U - 1)^2 / (g/U) = const,
///
/// i.e. in the Joukowski coordinate psi(zeta) = zeta - 2 + 1/zeta with
/// zeta = g/U the flow is affine: psi_t = e^{-t} psi_0 - 4 (1 - e^{-t}).
/// psi maps the closed exterior of the unit disc onto C minus the slot
/// [-4, 0]; the two preimages of any psi are zeta and 1/zeta, so branch
/// selection is |zeta| >= 1. Boundary points use the equivalent exact angle
/// map cos(theta_t/2) = e^{-t/2} cos(theta_0/2).
///
/// These maps are used as composition bricks by the restriction flow and as
/// oracles for the adaptive integrator.

#include <cmath>
#include <complex>

#include "rsle/geometry.hpp"

namespace rsle {

inline cplx joukowski_psi(cplx zeta) { return zeta - 2.0 + 1.0 / zeta; }

/// zeta from psi with |zeta| >= 1.
inline cplx joukowski_inv_exterior(cplx psi) {
    const cplx b = 2.0 + psi;
    const cplx d = std::sqrt(b * b - 4.0);
    const cplx r1 = 0.5 * (b + d);
    const cplx r2 = 0.5 * (b - d);
    return std::abs(r1) >= std::abs(r2) ? r1 : r2;
}

/// Exterior-disc frozen-driver step: advance g by time dt under driver U.
inline cplx radial_step_disc(cplx g, cplx U, double dt) {
    const cplx zeta = g / U;
    const double em = std::exp(-dt);
    const cplx psi = em * joukowski_psi(zeta) - 4.0 * (1.0 - em);
    return joukowski_inv_exterior(psi) * U;
}

/// Inverse step (un-grow the slit): preimage of g under the dt-step.
inline cplx radial_step_disc_inverse(cplx g, cplx U, double dt) {
    const cplx zeta = g / U;
    const double ep = std::exp(dt);
    const cplx psi = ep * joukowski_psi(zeta) + 4.0 * (ep - 1.0);
    return joukowski_inv_exterior(psi) * U;
}

/// Exact boundary angle update: theta = arg(g/U) in (0, 2pi) evolves along
/// the drift flow as cos(theta/2) -> e^{-dt/2} cos(theta/2).
inline double radial_step_angle(double theta, double dt) {
    const double c = std::exp(-0.5 * dt) * std::cos(0.5 * theta);
    return 2.0 * std::acos(c);
}

/// Time integral of 1/(2 sin^2(theta_s/2)) along the exact drift flow over
/// [0, dt]; closed form dt/2 + log(sin(theta_dt/2)/sin(theta_0/2)).
inline double radial_step_angle_fk(double theta0, double theta_dt, double dt) {
    return 0.5 * dt + std::log(std::sin(0.5 * theta_dt) / std::sin(0.5 * theta0));
}

/// Tip of the slit grown by a frozen-driver step of duration dt, disc frame,
/// driver U: the real-radial point with psi = 4 (e^{dt} - 1), lifted by U.
inline cplx radial_step_tip_disc(cplx U, double dt) {
    const double rho2 = 4.0 * (std::exp(dt) - 1.0);
    const double rho = std::sqrt(rho2);
    const double zeta = 1.0 + 0.5 * rho2 + rho * std::sqrt(1.0 + 0.25 * rho2);
    return zeta * U;
}

/// Half-plane frame versions. The driver is the real point p (the image of
/// the disc driver under the frame map); the flow field is
/// (1+w^2)/2 (1+pw)/(w-p). The target i maps to disc infinity, so points
/// next to i use the exact linearization G'(i) = e^{dt}.
inline cplx radial_step_half_plane(cplx w, double p, double dt) {
    const cplx i(0.0, 1.0);
    if (std::abs(w - i) < 1e-9) return i + (w - i) * std::exp(dt);
    const cplx U = disc_of_half_plane(p);
    return half_plane_of_disc(radial_step_disc(disc_of_half_plane(w), U, dt));
}

inline cplx radial_step_half_plane_inverse(cplx w, double p, double dt) {
    const cplx i(0.0, 1.0);
    if (std::abs(w - i) < 1e-9) return i + (w - i) * std::exp(-dt);
    const cplx U = disc_of_half_plane(p);
    return half_plane_of_disc(radial_step_disc_inverse(disc_of_half_plane(w), U, dt));
}

inline cplx radial_step_tip_half_plane(double p, double dt) {
    const cplx U = disc_of_half_plane(p);
    return half_plane_of_disc(radial_step_tip_disc(U, dt));
}

/// Flow vector field in the half-plane frame.
inline cplx radial_field_half_plane(cplx w, double p) {
    return 0.5 * (1.0 + w * w) * (1.0 + p * w) / (w - p);
}

} // namespace rsle
