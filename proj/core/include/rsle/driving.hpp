#pragma once

/// Brownian driving functions xi_t with E[xi_t xi_s] = kappa min(t,s), sampled
/// on a uniform grid, plus deterministic drivers for tests. A path is immutable
/// after construction and fully determined by (seed, sample_index).
///
/// Note on refinement: halving dt with the same (seed, sample_index) yields a
/// statistically equivalent but pathwise different driver; the law is the
/// contract, not pathwise refinement consistency.

#include <complex>
#include <cstdint>
#include <vector>

#include "rsle/estimate.hpp"

namespace rsle {

struct DrivingPath {
    double kappa = 0.0;
    std::vector<double> t_grid;  // strictly increasing, t_grid[0] = 0
    std::vector<double> xi;      // xi[0] = 0, len == len(t_grid)
    uint64_t seed = 0;
    uint64_t sample_index = 0;

    std::size_t steps() const { return t_grid.empty() ? 0 : t_grid.size() - 1; }
    double t_max() const { return t_grid.empty() ? 0.0 : t_grid.back(); }
    /// U_k = exp(i xi_k), the driving singularity on the unit circle.
    std::complex<double> U(std::size_t k) const {
        return std::polar(1.0, xi[k]);
    }
};

/// Sample one Brownian driver on a uniform grid of step dt (last step may be
/// shorter). Increments are independent N(0, kappa * step).
DrivingPath sample_path(double kappa, double t_max, double dt, uint64_t seed,
                        uint64_t sample_index);

enum class DeterministicKind { zero, linear };

/// xi = 0 or xi = rate * t, with kappa recorded as 0.
DrivingPath deterministic_path(DeterministicKind kind, double rate, double t_max,
                               double dt);

struct SpinMartingaleResult {
    double t;
    Estimate real_part;
    Estimate imag_part;
};

/// Monte Carlo mean of exp(i s xi_t + kappa s^2 t / 2) at the requested times;
/// both components should be compatible with (1, 0) within sampling error.
std::vector<SpinMartingaleResult> spin_martingale_check(
    double kappa, double s, const std::vector<double>& t_list, std::size_t n_samples,
    uint64_t seed, unsigned workers = 1);

} // namespace rsle
