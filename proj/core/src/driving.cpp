#include "rsle/driving.hpp"

#include <cmath>
#include <stdexcept>

#include "rsle/rng.hpp"

namespace rsle {

namespace {
std::vector<double> uniform_grid(double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0) || dt > t_max || !std::isfinite(t_max) ||
        !std::isfinite(dt))
        throw std::domain_error("need 0 < dt <= t_max, both finite");
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(t_max / dt) + 2);
    t.push_back(0.0);
    while (t.back() + dt < t_max - 1e-12 * t_max) t.push_back(t.back() + dt);
    t.push_back(t_max);
    return t;
}
} // namespace

DrivingPath sample_path(double kappa, double t_max, double dt, uint64_t seed,
                        uint64_t sample_index) {
    if (kappa < 0.0 || !std::isfinite(kappa))
        throw std::domain_error("kappa must be finite and >= 0");
    DrivingPath p;
    p.kappa = kappa;
    p.seed = seed;
    p.sample_index = sample_index;
    p.t_grid = uniform_grid(t_max, dt);
    p.xi.resize(p.t_grid.size());
    p.xi[0] = 0.0;
    CounterRng rng(seed, sample_index);
    for (std::size_t k = 1; k < p.t_grid.size(); ++k) {
        const double step = p.t_grid[k] - p.t_grid[k - 1];
        p.xi[k] = p.xi[k - 1] + std::sqrt(kappa * step) * rng.next_normal();
    }
    return p;
}

DrivingPath deterministic_path(DeterministicKind kind, double rate, double t_max,
                               double dt) {
    DrivingPath p;
    p.kappa = 0.0;
    p.t_grid = uniform_grid(t_max, dt);
    p.xi.resize(p.t_grid.size(), 0.0);
    if (kind == DeterministicKind::linear) {
        for (std::size_t k = 0; k < p.t_grid.size(); ++k) p.xi[k] = rate * p.t_grid[k];
    }
    return p;
}

std::vector<SpinMartingaleResult> spin_martingale_check(
    double kappa, double s, const std::vector<double>& t_list, std::size_t n_samples,
    uint64_t seed, unsigned workers) {
    if (n_samples < 100)
        throw std::invalid_argument("spin_martingale_check needs N >= 100");
    // xi_t at each requested time accumulates independent increments; one
    // stream per sample, consumed in time order.
    std::vector<double> ts = t_list;
    std::vector<std::vector<double>> re(t_list.size()), im(t_list.size());
    for (auto& v : re) v.resize(n_samples);
    for (auto& v : im) v.resize(n_samples);

    parallel_for_indexed(n_samples, workers, [&](std::size_t i) {
        CounterRng rng(seed, i);
        double xi = 0.0, t_prev = 0.0;
        for (std::size_t j = 0; j < ts.size(); ++j) {
            const double dt = ts[j] - t_prev;
            if (dt < 0.0) throw std::invalid_argument("t_list must be nondecreasing");
            xi += std::sqrt(kappa * dt) * rng.next_normal();
            t_prev = ts[j];
            const double w = std::exp(0.5 * kappa * s * s * ts[j]);
            re[j][i] = w * std::cos(s * xi);
            im[j][i] = w * std::sin(s * xi);
        }
    });

    std::vector<SpinMartingaleResult> out;
    out.reserve(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j)
        out.push_back({ts[j], estimate_from_samples(re[j]), estimate_from_samples(im[j])});
    return out;
}

} // namespace rsle
