#include "rsle/boundary_observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsle/rng.hpp"

namespace rsle {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;

inline double cot_half(double theta) {
    return std::cos(0.5 * theta) / std::sin(0.5 * theta);
}
} // namespace

void theta_step(AngleState& state, double dxi, double dt, double h,
                const AngleConfig& cfg, double t_now) {
    if (!state.alive) return;
    if (!(dt > 0.0)) throw std::domain_error("theta_step needs dt > 0");

    // drift phase: Euler sub-steps, dt_sub shrinking like sin^2(theta/2)
    double done = 0.0;
    double theta = state.theta;
    double fk = 0.0;
    while (done < dt) {
        const double s = std::sin(0.5 * theta);
        double hs = dt - done;
        if (s < cfg.substep_sin) {
            const double scale = (s / cfg.substep_sin) * (s / cfg.substep_sin);
            hs = std::min(hs, std::max(dt * scale, cfg.dt_floor));
        }
        const double drift = cot_half(theta);
        const double theta_mid = theta + 0.5 * hs * drift;
        const double smid = std::sin(0.5 * theta_mid);
        fk -= h * hs / (2.0 * smid * smid);
        theta += hs * drift;
        done += hs;
    }
    // noise once per driver step
    theta -= dxi;

    state.theta = theta;
    state.fk_log_weight += fk;
    if (theta <= cfg.theta_cut || theta >= two_pi - cfg.theta_cut) {
        state.alive = false;
        state.tau = t_now + dt;
    }
}

std::vector<Estimate> estimate_f_h(double kappa, double h, double theta0,
                                   const std::vector<double>& t_list, double t_max,
                                   double dt, std::size_t n_samples, uint64_t seed,
                                   const AngleConfig& cfg, unsigned workers) {
    if (n_samples < 2) throw std::invalid_argument("estimate_f_h needs N >= 2");
    if (!(theta0 > 0.0) || !(theta0 < two_pi))
        throw std::domain_error("theta0 must lie in (0, 2 pi)");
    if (h < 0.0) throw std::domain_error("h must be >= 0");

    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t_max / dt));
    std::vector<std::size_t> report_step;
    report_step.reserve(t_list.size());
    for (double t : t_list) {
        if (t < 0.0 || t > t_max + 1e-9)
            throw std::invalid_argument("report time outside [0, t_max]");
        report_step.push_back(static_cast<std::size_t>(std::llround(t / dt)));
    }

    std::vector<std::vector<double>> samples(t_list.size());
    for (auto& v : samples) v.resize(n_samples);

    parallel_for_indexed(n_samples, workers, [&](std::size_t i) {
        CounterRng rng(seed, i);
        AngleState st;
        st.theta = theta0;
        const double sd = std::sqrt(kappa * dt);
        std::size_t next_report = 0;
        for (std::size_t j = 0; next_report < report_step.size(); ++j) {
            while (next_report < report_step.size() && report_step[next_report] == j) {
                samples[next_report][i] = st.alive ? std::exp(st.fk_log_weight) : 0.0;
                ++next_report;
            }
            if (j == n_steps) break;
            if (st.alive) {
                theta_step(st, sd * rng.next_normal(), dt, h, cfg,
                           static_cast<double>(j) * dt);
            }
        }
    });

    std::vector<Estimate> out;
    out.reserve(t_list.size());
    for (auto& v : samples) out.push_back(estimate_from_samples(v));
    return out;
}

LambdaFit fit_lambda(const std::vector<double>& t_list,
                     const std::vector<Estimate>& estimates, double window_lo,
                     double window_hi) {
    if (t_list.size() != estimates.size())
        throw std::invalid_argument("fit_lambda: size mismatch");
    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < t_list.size(); ++i) {
        if (t_list[i] < window_lo - 1e-12 || t_list[i] > window_hi + 1e-12) continue;
        if (estimates[i].mean <= 0.0)
            throw std::runtime_error(
                "fit_lambda: nonpositive mean inside the fit window; shorten the horizon");
        x.push_back(t_list[i]);
        y.push_back(-std::log(estimates[i].mean));
        const double rel = estimates[i].stderr_ / estimates[i].mean;
        w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
    }
    if (x.size() < 3)
        throw std::runtime_error("fit_lambda: need at least 3 positive means in window");

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double denom = sw * swxx - swx * swx;
    LambdaFit fit;
    fit.lambda_hat = (sw * swxy - swx * swy) / denom;
    const double intercept = (swy - fit.lambda_hat * swx) / sw;
    fit.stderr_ = std::sqrt(sw / denom);
    double ss_res = 0, ss_tot = 0;
    const double ybar = swy / sw;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fit_y = intercept + fit.lambda_hat * x[i];
        ss_res += w[i] * (y[i] - fit_y) * (y[i] - fit_y);
        ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    return fit;
}

GridFunction apply_calogero(const GridFunction& fn, double kappa, double h) {
    if (fn.values.size() < 5)
        throw std::invalid_argument("apply_calogero: need at least 5 grid points");
    if (!(fn.theta_min > 0.0) || !(fn.dtheta > 0.0))
        throw std::domain_error("apply_calogero: invalid grid");
    GridFunction out;
    out.theta_min = fn.theta_min + fn.dtheta;
    out.dtheta = fn.dtheta;
    out.values.resize(fn.values.size() - 2);
    const double inv_h2 = 1.0 / (fn.dtheta * fn.dtheta);
    const double inv_2h = 1.0 / (2.0 * fn.dtheta);
    for (std::size_t i = 1; i + 1 < fn.values.size(); ++i) {
        const double theta = fn.theta_at(i);
        const double d2 = (fn.values[i + 1] - 2.0 * fn.values[i] + fn.values[i - 1]) * inv_h2;
        const double d1 = (fn.values[i + 1] - fn.values[i - 1]) * inv_2h;
        const double s = std::sin(0.5 * theta);
        out.values[i - 1] =
            0.5 * kappa * d2 + cot_half(theta) * d1 - h / (2.0 * s * s) * fn.values[i];
    }
    return out;
}

GeneratorCheck generator_consistency(double kappa, double h, double theta0, double t,
                                     double dt, std::size_t n_samples, uint64_t seed,
                                     const std::function<double(double)>& phi,
                                     unsigned workers) {
    // (H_h phi)(theta0) by 5-point central differences
    const double e = 1e-3;
    const double f0 = phi(theta0);
    const double fp1 = phi(theta0 + e), fm1 = phi(theta0 - e);
    const double fp2 = phi(theta0 + 2 * e), fm2 = phi(theta0 - 2 * e);
    const double d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * e);
    const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * e * e);
    const double s0 = std::sin(0.5 * theta0);
    const double gen =
        0.5 * kappa * d2 + cot_half(theta0) * d1 - h / (2.0 * s0 * s0) * f0;

    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t / dt));
    std::vector<double> vals(n_samples);
    AngleConfig cfg;
    parallel_for_indexed(n_samples, workers, [&](std::size_t i) {
        CounterRng rng(seed, i);
        AngleState st;
        st.theta = theta0;
        const double sd = std::sqrt(kappa * dt);
        for (std::size_t j = 0; j < n_steps && st.alive; ++j)
            theta_step(st, sd * rng.next_normal(), dt, h, cfg, static_cast<double>(j) * dt);
        vals[i] = st.alive ? phi(st.theta) * std::exp(st.fk_log_weight) : 0.0;
    });
    const Estimate est = estimate_from_samples(vals);

    GeneratorCheck chk;
    chk.mc_increment = est.mean - phi(theta0);
    chk.mc_stderr = est.stderr_;
    chk.generator_value = t * gen;
    chk.discrepancy = std::abs(chk.mc_increment - chk.generator_value);
    chk.band = 3.0 * est.stderr_ + 10.0 * t * t;
    chk.within_band = chk.discrepancy <= chk.band;
    return chk;
}

} // namespace rsle
