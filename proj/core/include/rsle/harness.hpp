#pragma once

/// Experiment orchestration: validated configuration, deterministic parallel
/// execution, CSV/JSON persistence, and the acceptance-suite runner. Results
/// depend only on (seed, n_samples, dt, parameters), never on the worker
/// count: every reduction is pairwise over a fixed index order.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rsle {

struct ExperimentConfig {
    std::string experiment;  // one of the subcommand names below
    double kappa = 6.0;
    double h = 0.0;
    bool have_h = false;
    double r = 1.0, s_index = 2.0;  // Kac indices for `params`
    bool have_rs = false;
    double spin = 1.0;              // spin s for martingale-check
    double theta0 = 3.141592653589793;
    double t_max = 1.0;
    double dt = 1e-3;
    double a = 1.0, ell = 0.5;      // slit hull
    double grid_dtheta = 1e-3;
    std::vector<double> t_list;
    std::size_t n_samples = 1000;
    std::size_t n_points = 200;
    uint64_t seed = 1;
    unsigned workers = 0;           // 0 = hardware concurrency
    std::string out_dir = ".";
    std::string points_file;
    bool json_output = false;
};

struct RunReport {
    int exit_code = 0;
    std::string json;   // machine-readable report (also written to out_dir)
    std::string human;  // flat key=value summary
};

/// Validate, dispatch to the owning module, write artifacts, return report.
RunReport run(const ExperimentConfig& cfg);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool gating = true;  // stretch criteria report but do not gate
    std::string detail;
};

/// Run every acceptance criterion, streaming one line per criterion to `log`.
std::vector<CriterionResult> run_acceptance_suite(unsigned workers, std::ostream& log);

} // namespace rsle
