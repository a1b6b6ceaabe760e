#include "rsle/loewner_flow.hpp"

#include <cmath>
#include <stdexcept>

#include "rsle/radial_step.hpp"

namespace rsle {

namespace {

struct FlowState {
    cplx g;
    cplx log_deriv;
};

inline cplx flow_field(cplx g, cplx U) { return -g * (g + U) / (g - U); }

inline cplx log_deriv_field(cplx g, cplx U) {
    const cplx d = g - U;
    return -(g * g - 2.0 * U * g - U * U) / (d * d);
}

inline FlowState rk4(const FlowState& s, cplx U, double h) {
    auto f = [U](const FlowState& x) {
        return FlowState{flow_field(x.g, U), log_deriv_field(x.g, U)};
    };
    const FlowState k1 = f(s);
    const FlowState k2 = f({s.g + 0.5 * h * k1.g, s.log_deriv});
    const FlowState k3 = f({s.g + 0.5 * h * k2.g, s.log_deriv});
    const FlowState k4 = f({s.g + h * k3.g, s.log_deriv});
    return {s.g + h / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g),
            s.log_deriv + h / 6.0 * (k1.log_deriv + 2.0 * k2.log_deriv +
                                     2.0 * k3.log_deriv + k4.log_deriv)};
}

// Singularity-limited sub-step: |dg| stays a small fraction of the distance
// to the driving point, so the step scales like |g-U|^2 near it.
inline double singular_cap(cplx g, cplx U) {
    const double dist = std::abs(g - U);
    const double speed = std::abs(g) * std::abs(g + U) / std::max(dist, 1e-300);
    return 0.05 * dist / std::max(speed, 1e-300);
}

// Advance one driver step with frozen U. Returns false when swallowed.
// dt_floor applies to the singularity cap only; an almost-finished step with
// a roundoff-sized remainder is ordinary completion.
bool advance_driver_step(FlowState& s, cplx U, double step, const FlowConfig& cfg,
                         double t_left_edge, TrackedPoint& tp) {
    double done = 0.0;
    while (step - done > 1e-14 * step) {
        if (std::abs(s.g - U) <= cfg.eps_swallow) {
            tp.status = PointStatus::swallowed;
            tp.tau = t_left_edge + done;
            return false;
        }
        const double cap = singular_cap(s.g, U);
        if (cap < cfg.dt_floor) {
            tp.status = PointStatus::swallowed;
            tp.tau = t_left_edge + done;
            tp.floor_underflow = true;
            return false;
        }
        const double h = std::min({step - done, cfg.dt_base, cap});
        s = rk4(s, U, h);
        done += h;
    }
    return true;
}

} // namespace

PointTrajectory evolve_point(cplx z0, const DrivingPath& path, const FlowConfig& cfg) {
    if (std::abs(z0) < 1.0 - 1e-12)
        throw std::domain_error("evolve_point expects |z0| >= 1 (exterior-disc frame)");
    if (std::abs(z0 - cplx(1.0, 0.0)) < 1e-12)
        throw std::domain_error("z0 = 1 is the seed of the trace");

    const bool boundary = std::abs(std::abs(z0) - 1.0) < 1e-12;
    PointTrajectory traj;
    traj.final_state.z0 = z0;
    FlowState s{z0, cplx(0.0, 0.0)};
    traj.t.push_back(0.0);
    traj.g.push_back(s.g);
    traj.log_deriv.push_back(s.log_deriv);

    for (std::size_t k = 0; k + 1 < path.t_grid.size(); ++k) {
        const cplx U = path.U(k);
        const double step = path.t_grid[k + 1] - path.t_grid[k];
        if (!advance_driver_step(s, U, step, cfg, path.t_grid[k], traj.final_state))
            break;
        if (boundary) s.g /= std::abs(s.g);
        traj.t.push_back(path.t_grid[k + 1]);
        traj.g.push_back(s.g);
        traj.log_deriv.push_back(s.log_deriv);
    }
    traj.final_state.g = s.g;
    traj.final_state.log_deriv = s.log_deriv;
    return traj;
}

std::vector<cplx> evolve_log_derivative(cplx z0, const DrivingPath& path,
                                        const FlowConfig& cfg) {
    return evolve_point(z0, path, cfg).log_deriv;
}

cplx trace_point(double t, const DrivingPath& path, const FlowConfig& cfg) {
    if (t < 0.0 || t > path.t_max() + 1e-12)
        throw std::domain_error("trace time outside the driver range");
    if (t == 0.0) return path.U(0) * (1.0 + cfg.eps_lift);

    // locate the grid cell containing t; the reverse flow runs tau = t -> 0
    std::size_t k_hi = 0;
    while (k_hi + 1 < path.t_grid.size() && path.t_grid[k_hi + 1] < t - 1e-15) ++k_hi;

    // driver value at time t is the left value of the cell containing t
    cplx w = path.U(k_hi) * (1.0 + cfg.eps_lift);

    auto reverse_field = [](cplx v, cplx U) { return v * (v + U) / (v - U); };
    double tau = t;
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(k_hi);
    // the reverse flow legitimately starts next to the singularity (steps
    // there scale like eps_lift^2), so stagnation is detected by an absolute
    // floor and a step budget rather than cfg.dt_floor
    long steps_left = 40'000'000;
    while (tau > 1e-15 && k >= 0) {
        const cplx U = path.U(static_cast<std::size_t>(k));
        const double cell_lo = path.t_grid[static_cast<std::size_t>(k)];
        double target = std::max(cell_lo, 0.0);
        while (tau > target + 1e-15) {
            const double dist = std::abs(w - U);
            const double speed = std::abs(w) * std::abs(w + U) / std::max(dist, 1e-300);
            const double cap = 0.05 * dist / std::max(speed, 1e-300);
            if (cap < 1e-17 || --steps_left < 0)
                throw std::runtime_error("trace reverse flow blew up near the singularity");
            const double h = std::min({tau - target, cfg.dt_base, cap});
            auto f = [&](cplx v) { return reverse_field(v, U); };
            const cplx k1 = f(w);
            const cplx k2 = f(w + 0.5 * h * k1);
            const cplx k3 = f(w + 0.5 * h * k2);
            const cplx k4 = f(w + h * k3);
            w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            tau -= h;
        }
        --k;
    }
    return w;
}

RadialTrace radial_trace(const DrivingPath& path, const FlowConfig& cfg,
                         std::size_t n_points) {
    RadialTrace tr;
    tr.times.reserve(n_points);
    tr.gamma.reserve(n_points);
    const double T = path.t_max();
    for (std::size_t i = 1; i <= n_points; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(n_points);
        tr.times.push_back(t);
        tr.gamma.push_back(trace_point(t, path, cfg));
    }
    return tr;
}

HalfPlaneCheck to_half_plane_check(cplx w0, const DrivingPath& path,
                                   const FlowConfig& cfg, double xi_guard) {
    HalfPlaneCheck out;
    cplx g = disc_of_half_plane(w0);

    for (std::size_t k = 0; k + 1 < path.t_grid.size(); ++k) {
        if (std::abs(path.xi[k]) >= xi_guard || std::abs(path.xi[k + 1]) >= xi_guard) {
            out.skipped = true;
            return out;
        }
        const cplx U = path.U(k);
        const double step = path.t_grid[k + 1] - path.t_grid[k];
        const double p = -std::tan(0.5 * path.xi[k]);

        // advance the disc flow exactly, then integrate the half-plane ODE
        // with frozen p from the mapped state and compare endpoints
        const cplx g_next = radial_step_disc(g, U, step);
        cplx gt = half_plane_of_disc(g);
        const int nsub = 8;
        const double h = step / nsub;
        for (int j = 0; j < nsub; ++j) {
            auto f = [p](cplx v) { return radial_field_half_plane(v, p); };
            const cplx k1 = f(gt);
            const cplx k2 = f(gt + 0.5 * h * k1);
            const cplx k3 = f(gt + 0.5 * h * k2);
            const cplx k4 = f(gt + h * k3);
            gt += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        const double defect = std::abs(gt - half_plane_of_disc(g_next)) / step;
        out.max_residual_rate = std::max(out.max_residual_rate, defect);
        g = g_next;
    }
    (void)cfg;
    return out;
}

TransportedFields transport_vector_field(const AnalyticField& sigma,
                                         const AnalyticField& rho,
                                         const ConformalMap2& phi, double kappa) {
    if (!sigma.value || !rho.value || !rho.derivative || !phi.value || !phi.d1 || !phi.d2)
        throw std::invalid_argument("transport_vector_field: missing derivative sampler");
    TransportedFields out;
    out.rho_at = [rho, phi](cplx z) { return phi.d1(z) * rho.value(z); };
    out.sigma_at = [sigma, rho, phi, kappa](cplx z) {
        const cplx r = rho.value(z);
        return phi.d1(z) * sigma.value(z) + 0.5 * kappa * phi.d2(z) * r * r;
    };
    out.rho_prime_at = [rho, phi](cplx z) {
        return (phi.d2(z) * rho.value(z) + phi.d1(z) * rho.derivative(z)) / phi.d1(z);
    };
    return out;
}

} // namespace rsle
