#include <benchmark/benchmark.h>

#include <complex>

#include "rsle/boundary_observables.hpp"
#include "rsle/driving.hpp"
#include "rsle/loewner_flow.hpp"
#include "rsle/radial_step.hpp"
#include "rsle/restriction.hpp"
#include "rsle/rng.hpp"

using namespace rsle;

static void BM_PhiloxNormal(benchmark::State& state) {
    CounterRng rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
}
BENCHMARK(BM_PhiloxNormal);

static void BM_ExactDiscStep(benchmark::State& state) {
    cplx g(1.5, 0.7);
    const cplx U = std::polar(1.0, 0.3);
    for (auto _ : state) {
        g = radial_step_disc(g, U, 1e-3);
        benchmark::DoNotOptimize(g);
        if (std::abs(g) > 1e6) g = cplx(1.5, 0.7);
    }
}
BENCHMARK(BM_ExactDiscStep);

static void BM_ThetaStep(benchmark::State& state) {
    AngleState st;
    st.theta = 2.0;
    AngleConfig cfg;
    CounterRng rng(2, 0);
    const double dt = 1e-3, sd = std::sqrt(6.0 * dt);
    for (auto _ : state) {
        theta_step(st, sd * rng.next_normal(), dt, 1.0, cfg, 0.0);
        if (!st.alive) {
            st = AngleState{};
            st.theta = 2.0;
        }
        benchmark::DoNotOptimize(st.theta);
    }
}
BENCHMARK(BM_ThetaStep);

static void BM_FlowDriverStep(benchmark::State& state) {
    const DrivingPath p = sample_path(6.0, 1.0, 1e-3, 7, 0);
    FlowConfig cfg;
    for (auto _ : state) {
        const PointTrajectory tr = evolve_point(cplx(0.0, 2.0) + cplx(1.0, 0.0), p, cfg);
        benchmark::DoNotOptimize(tr.final_state.g);
    }
}
BENCHMARK(BM_FlowDriverStep);

static void BM_TransportedStep(benchmark::State& state) {
    SlitHull hull{1.0, 0.5};
    TransportConfig cfg;
    cfg.record_history = false;
    TransportedFlow flow(hull, 8.0 / 3.0, cfg);
    CounterRng rng(3, 0);
    const double sd = std::sqrt(8.0 / 3.0 * cfg.dt);
    for (auto _ : state) {
        flow.step(sd * rng.next_normal());
        if (flow.hit() || flow.t() > 1.5) flow = TransportedFlow(hull, 8.0 / 3.0, cfg);
        benchmark::DoNotOptimize(flow.t_hat());
    }
}
BENCHMARK(BM_TransportedStep);

BENCHMARK_MAIN();
