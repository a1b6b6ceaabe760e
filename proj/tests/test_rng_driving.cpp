#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "rsle/driving.hpp"
#include "rsle/rng.hpp"

using namespace rsle;

TEST_CASE("counter rng determinism and stream separation") {
    CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
    bool differs_stream = false, differs_seed = false;
    CounterRng a2(42, 7);
    for (int i = 0; i < 8; ++i) {
        const uint64_t w = a2.next_u64();
        if (w != c.next_u64()) differs_stream = true;
        if (w != d.next_u64()) differs_seed = true;
    }
    CHECK(differs_stream);
    CHECK(differs_seed);
}

TEST_CASE("stateless word addressing matches sequential drawing") {
    CounterRng r(5, 11);
    std::vector<uint64_t> seq;
    for (int i = 0; i < 10; ++i) seq.push_back(r.next_u64());
    for (int i = 0; i < 10; ++i) CHECK(CounterRng(5, 11).word_at(i) == seq[i]);
}

TEST_CASE("first draws over many streams have no collisions") {
    std::set<uint64_t> seen;
    std::size_t dup = 0;
    for (uint64_t i = 0; i < 1000000; ++i)
        if (!seen.insert(CounterRng(2024, i).word_at(0)).second) ++dup;
    CHECK(dup <= 1);  // birthday expectation is ~5e-8
}

TEST_CASE("normals have the right moments") {
    CounterRng r(99, 0);
    const int n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = r.next_normal();
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("sampled paths are deterministic and have xi0 = 0") {
    const DrivingPath p1 = sample_path(6.0, 1.0, 1e-2, 12, 3);
    const DrivingPath p2 = sample_path(6.0, 1.0, 1e-2, 12, 3);
    REQUIRE(p1.xi.size() == p2.xi.size());
    for (std::size_t i = 0; i < p1.xi.size(); ++i) CHECK(p1.xi[i] == p2.xi[i]);
    CHECK(p1.xi[0] == 0.0);
    CHECK(p1.t_grid.front() == 0.0);
    CHECK(p1.t_grid.back() == doctest::Approx(1.0));
    CHECK(std::abs(std::abs(p1.U(5)) - 1.0) < 1e-15);
}

TEST_CASE("degenerate kappa = 0 gives the zero driver") {
    const DrivingPath p = sample_path(0.0, 1.0, 0.1, 1, 0);
    for (double x : p.xi) CHECK(x == 0.0);
}

TEST_CASE("deterministic drivers") {
    const DrivingPath z = deterministic_path(DeterministicKind::zero, 0.0, 1.0, 0.125);
    for (double x : z.xi) CHECK(x == 0.0);
    const DrivingPath l = deterministic_path(DeterministicKind::linear, 1.0, 0.5, 0.125);
    CHECK(l.xi.back() == doctest::Approx(0.5));
    const DrivingPath l0 = deterministic_path(DeterministicKind::linear, 0.0, 1.0, 0.125);
    for (double x : l0.xi) CHECK(x == 0.0);
    CHECK_THROWS_AS(deterministic_path(DeterministicKind::zero, 0.0, 1.0, -0.1),
                    std::domain_error);
}

TEST_CASE("terminal variance matches kappa t") {
    const double kappa = 6.0, t = 1.0;
    const int n = 100000;
    double s2 = 0;
    for (int i = 0; i < n; ++i) {
        const DrivingPath p = sample_path(kappa, t, 0.05, 777, i);
        s2 += p.xi.back() * p.xi.back();
    }
    const double var = s2 / n;
    // chi^2 fluctuation: sd of the sample variance is kappa t sqrt(2/n)
    const double band = 3.0 * kappa * t * std::sqrt(2.0 / n);
    CHECK(std::abs(var - kappa * t) < band);
}

TEST_CASE("pooled increment variance") {
    const double kappa = 2.0;
    for (double dt : {0.01, 0.1}) {
        double s2 = 0;
        std::size_t cnt = 0;
        for (int i = 0; i < 400; ++i) {
            const DrivingPath p = sample_path(kappa, 1.0, dt, 31, i);
            for (std::size_t k = 1; k < p.xi.size(); ++k) {
                const double inc = p.xi[k] - p.xi[k - 1];
                const double step = p.t_grid[k] - p.t_grid[k - 1];
                s2 += inc * inc / (kappa * step);
                ++cnt;
            }
        }
        const double ratio = s2 / static_cast<double>(cnt);
        const double sigma_hat = std::sqrt(2.0 / static_cast<double>(cnt));
        CHECK(std::abs(ratio - 1.0) <= 5.0 * sigma_hat);
    }
}

TEST_CASE("spin martingale") {
    // s = 0 is exactly 1 for every sample
    const auto r0 = spin_martingale_check(6.0, 0.0, {0.5}, 200, 5, 1);
    CHECK(r0[0].real_part.mean == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r0[0].real_part.stderr_ == doctest::Approx(0.0).epsilon(1e-15));

    const auto r1 = spin_martingale_check(2.0, 1.0, {1.0}, 100000, 6, 2);
    CHECK(std::abs(r1[0].real_part.mean - 1.0) <= 3.0 * r1[0].real_part.stderr_);
    CHECK(std::abs(r1[0].imag_part.mean) <= 3.0 * r1[0].imag_part.stderr_);

    const auto r2 = spin_martingale_check(6.0, 2.0, {0.25}, 100000, 7, 2);
    CHECK(std::abs(r2[0].real_part.mean - 1.0) <= 3.0 * r2[0].real_part.stderr_);

    CHECK_THROWS_AS(spin_martingale_check(2.0, 1.0, {1.0}, 10, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("worker count does not change results") {
    const auto r1 = spin_martingale_check(2.0, 1.0, {0.5, 1.0}, 4000, 11, 1);
    const auto r8 = spin_martingale_check(2.0, 1.0, {0.5, 1.0}, 4000, 11, 8);
    for (std::size_t j = 0; j < r1.size(); ++j) {
        CHECK(r1[j].real_part.mean == r8[j].real_part.mean);
        CHECK(r1[j].real_part.stderr_ == r8[j].real_part.stderr_);
    }
}
