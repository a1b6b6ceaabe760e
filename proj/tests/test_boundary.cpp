#include <doctest.h>

#include <cmath>

#include "rsle/boundary_observables.hpp"
#include "rsle/cft_params.hpp"
#include "rsle/driving.hpp"
#include "rsle/loewner_flow.hpp"

using namespace rsle;

namespace {
const double pi = 3.141592653589793238462643383279;
}

TEST_CASE("theta drift fixes the symmetric point") {
    AngleState st;
    st.theta = pi;
    AngleConfig cfg;
    theta_step(st, 0.0, 0.01, 0.0, cfg, 0.0);
    CHECK(st.theta == doctest::Approx(pi).epsilon(1e-12));
    CHECK(st.fk_log_weight == 0.0);  // h = 0
    CHECK(st.alive);
}

TEST_CASE("h = 0 accumulates no weight") {
    AngleState st;
    st.theta = 1.0;
    AngleConfig cfg;
    for (int k = 0; k < 100; ++k) theta_step(st, 0.001, 0.01, 0.0, cfg, 0.01 * k);
    CHECK(st.fk_log_weight == 0.0);
}

TEST_CASE("kill at the cut boundary") {
    AngleState st;
    st.theta = 0.05;
    AngleConfig cfg;
    theta_step(st, 0.2, 0.001, 0.0, cfg, 0.0);  // noise pushes theta below 0
    CHECK(!st.alive);
    CHECK(st.tau == doctest::Approx(0.001));
}

TEST_CASE("drift matches the exact angle map at small dt") {
    AngleState st;
    st.theta = 1.3;
    AngleConfig cfg;
    const double dt = 1e-5;
    double t = 0;
    for (int k = 0; k < 1000; ++k, t += dt) theta_step(st, 0.0, dt, 0.0, cfg, t);
    const double exact = 2.0 * std::acos(std::exp(-0.5 * t) * std::cos(0.5 * 1.3));
    CHECK(st.theta == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("pathwise equivalence with the complex flow") {
    const double kappa = 6.0, dt = 1e-5, t_max = 0.3, theta0 = 2.2;
    const DrivingPath path = sample_path(kappa, t_max, dt, 140, 3);
    FlowConfig fc;
    fc.dt_base = dt;
    const PointTrajectory tr = evolve_point(std::polar(1.0, theta0), path, fc);
    AngleState st;
    st.theta = theta0;
    AngleConfig ac;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < tr.t.size(); ++k) {
        theta_step(st, path.xi[k + 1] - path.xi[k], dt, 0.0, ac, tr.t[k]);
        if (!st.alive) break;
        double th = std::arg(tr.g[k + 1] / path.U(k + 1));
        if (th < 0) th += 2 * pi;
        if (std::sin(0.5 * th) < 0.01) break;
        worst = std::max(worst, std::abs(th - st.theta));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("estimate_f_h basics") {
    // t = 0 estimate is exactly 1
    const auto est0 = estimate_f_h(6.0, 0.0, pi, {0.0}, 0.1, 1e-2, 50, 9, {}, 1);
    CHECK(est0[0].mean == doctest::Approx(1.0));
    CHECK(est0[0].stderr_ == doctest::Approx(0.0));

    // survival probability is nonincreasing in t
    const auto est = estimate_f_h(6.0, 0.0, pi, {0.5, 1.0, 1.5, 2.0}, 2.0, 1e-2,
                                  4000, 10, {}, 2);
    for (std::size_t i = 1; i < est.size(); ++i) CHECK(est[i].mean <= est[i - 1].mean);

    CHECK_THROWS_AS(estimate_f_h(6.0, 0.0, pi, {0.5}, 1.0, 1e-2, 1, 1, {}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_f_h(6.0, 0.0, 7.0, {0.5}, 1.0, 1e-2, 10, 1, {}, 1),
                    std::domain_error);
}

TEST_CASE("estimator is independent of worker count") {
    const auto a = estimate_f_h(6.0, 1.0, pi, {0.5, 1.0}, 1.0, 1e-2, 2000, 77, {}, 1);
    const auto b = estimate_f_h(6.0, 1.0, pi, {0.5, 1.0}, 1.0, 1e-2, 2000, 77, {}, 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean == b[i].mean);
        CHECK(a[i].stderr_ == b[i].stderr_);
    }
}

TEST_CASE("fit_lambda recovers an exact exponential") {
    std::vector<double> ts;
    std::vector<Estimate> est;
    for (double t = 1.0; t <= 3.0; t += 0.25) {
        ts.push_back(t);
        est.push_back({std::exp(-0.25 * t), 1e-6, 1000});
    }
    const LambdaFit fit = fit_lambda(ts, est, 1.0, 3.0);
    CHECK(fit.lambda_hat == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<Estimate> bad = est;
    bad[3].mean = -1.0;
    CHECK_THROWS(fit_lambda(ts, bad, 1.0, 3.0));
}

TEST_CASE("kappa = 8 exponent from the same estimator pipeline") {
    // lambda(0) = (kappa-4)/8 = 1/2 at kappa = 8
    std::vector<double> ts;
    for (double t = 1.5; t <= 4.0 + 1e-9; t += 0.5) ts.push_back(t);
    const auto est = estimate_f_h(8.0, 0.0, pi, ts, 4.0, 2e-3, 50000, 880, {}, 2);
    const LambdaFit fit = fit_lambda(ts, est, 1.5, 4.0);
    CHECK(fit.lambda_hat == doctest::Approx(0.5).epsilon(0.08));
}

TEST_CASE("calogero operator: constants and eigenfunctions") {
    GridFunction f;
    f.theta_min = 0.1;
    f.dtheta = 1e-3;
    const std::size_t n = static_cast<std::size_t>((2 * pi - 0.2) / f.dtheta) + 1;

    SUBCASE("constant function with h = 0 maps to zero") {
        f.values.assign(n, 3.7);
        const GridFunction out = apply_calogero(f, 6.0, 0.0);
        for (double v : out.values) CHECK(std::abs(v) < 1e-7);
    }

    SUBCASE("sin(theta/2) is the (6,1) eigenfunction with eps = -5/4") {
        f.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) f.values[i] = std::sin(0.5 * f.theta_at(i));
        const GridFunction out = apply_calogero(f, 6.0, 1.0);
        double sup_rel = 0.0;
        for (std::size_t i = 0; i < out.values.size(); ++i) {
            const double expect = -1.25 * f.values[i + 1];
            sup_rel = std::max(sup_rel, std::abs(out.values[i] - expect) /
                                            std::abs(expect));
        }
        CHECK(sup_rel <= 1e-4);
    }

    SUBCASE("general (kappa, h): sin^{delta_+}(theta/2) eigenfunction") {
        const double kappa = 3.3, h = 0.7;
        const ExponentBundle e = exponent_bundle(kappa, h);
        const double eps = -e.lambda;
        f.dtheta = 2e-4;
        const std::size_t m = static_cast<std::size_t>((2 * pi - 0.2) / f.dtheta) + 1;
        f.values.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            f.values[i] = std::pow(std::sin(0.5 * f.theta_at(i)), e.delta_plus);
        const GridFunction out = apply_calogero(f, kappa, h);
        double sup_rel = 0.0;
        for (std::size_t i = 0; i < out.values.size(); ++i)
            sup_rel = std::max(sup_rel, std::abs(out.values[i] - eps * f.values[i + 1]) /
                                            std::abs(eps * f.values[i + 1]));
        CHECK(sup_rel < 5e-4);
    }

    SUBCASE("too few points throws") {
        f.values.assign(3, 1.0);
        CHECK_THROWS_AS(apply_calogero(f, 6.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("generator consistency for smooth observables") {
    // phi constant: increment should vanish within noise (it is exactly 0 at h=0)
    const GeneratorCheck c0 = generator_consistency(
        2.0, 0.0, 2.0, 0.01, 1e-3, 2000, 31, [](double) { return 1.0; }, 2);
    CHECK(std::abs(c0.mc_increment) <= 1e-12);
    CHECK(c0.within_band);

    // phi = cos theta at kappa = 2, h = 0
    const GeneratorCheck c1 = generator_consistency(
        2.0, 0.0, 2.0, 0.01, 1e-4, 200000, 32, [](double th) { return std::cos(th); }, 2);
    CHECK(c1.within_band);
}

TEST_CASE("eigenfunction evolves by its eigenvalue under the weighted flow") {
    // E[F_h(theta_t) e^FK] = e^{eps t} F_h(theta0), kappa = 6, h = 1
    const double kappa = 6.0, h = 1.0, theta0 = 2.0, t = 0.05;
    const std::size_t N = 200000;
    const double eps = -1.25;
    const GeneratorCheck c = generator_consistency(
        kappa, h, theta0, t, 1e-4, N, 33, [](double th) { return std::sin(0.5 * th); }, 2);
    // the finite-difference generator acting on the eigenfunction is eps F
    CHECK(std::abs(c.generator_value - eps * t * std::sin(0.5 * theta0)) < 1e-5);
    // and the weighted expectation follows e^{eps t} F within the band
    const double eig_increment = (std::exp(eps * t) - 1.0) * std::sin(0.5 * theta0);
    CHECK(std::abs(c.mc_increment - eig_increment) <= c.band);
}
