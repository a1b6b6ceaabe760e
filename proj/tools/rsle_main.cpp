// rsle: radial stochastic Loewner evolution experiments.
//
// Subcommands map one to one onto the library's experiment runners; global
// flags --seed/--workers/--out/--json apply to all of them, and any flag can
// also be given through --config file.ini (CLI flags win).

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsle/harness.hpp"
#include "rsle/version.hpp"

namespace {

void add_common(CLI::App* cmd, rsle::ExperimentConfig& cfg) {
    cmd->add_option("--kappa", cfg.kappa, "SLE parameter kappa");
    cmd->add_option("--t-max", cfg.t_max, "time horizon");
    cmd->add_option("--dt", cfg.dt, "driver step");
    cmd->add_option("--n", cfg.n_samples, "number of Monte Carlo samples");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial SLE simulation toolkit"};
    // --h is a domain flag (boundary weight), so help is --help only
    app.set_help_flag("--help", "print help and exit");
    app.set_version_flag("--version", rsle::version_string);
    app.set_config("--config", "", "read options from an INI file");
    app.require_subcommand(1);

    rsle::ExperimentConfig cfg;
    app.add_option("--seed", cfg.seed, "base RNG seed")->capture_default_str();
    app.add_option("--workers", cfg.workers,
                   "worker threads (0 = hardware concurrency)");
    app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    app.add_flag("--json", cfg.json_output, "print the JSON report to stdout");

    auto add_sub = [&app](const char* name, const char* desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->set_help_flag("--help", "print help and exit");
        s->fallthrough(true);  // let --seed/--workers/--out/--json trail the subcommand
        return s;
    };

    auto* params = add_sub("params", "derived CFT constants for kappa");
    params->add_option("--kappa", cfg.kappa)->required();
    auto* opt_h = params->add_option("--h", cfg.h, "boundary weight");
    auto* opt_r = params->add_option("--r", cfg.r, "Kac index r");
    auto* opt_s = params->add_option("--s", cfg.s_index, "Kac index s");

    auto* dr = add_sub("sample-driver", "sample Brownian drivers to CSV");
    add_common(dr, cfg);

    auto* tr = add_sub("trace", "reconstruct the trace gamma(t)");
    add_common(tr, cfg);
    tr->add_option("--n-points", cfg.n_points, "trace sample count");

    auto* fl = add_sub("flow", "evolve tracked points under one driver");
    add_common(fl, cfg);
    fl->add_option("--points", cfg.points_file, "CSV of re,im starting points")
        ->required();

    auto* de = add_sub("derivative-exponent",
                                  "estimate f_h decay and fit lambda");
    add_common(de, cfg);
    de->add_option("--h", cfg.h, "boundary weight h");
    de->add_option("--theta0", cfg.theta0, "starting angle");

    auto* eig = add_sub("eigen-check", "Calogero eigenfunction residual");
    eig->add_option("--kappa", cfg.kappa)->required();
    eig->add_option("--h", cfg.h)->required();
    eig->add_option("--grid-dtheta", cfg.grid_dtheta, "grid spacing");

    auto* mart = add_sub("martingale-check", "spin martingale flatness");
    add_common(mart, cfg);
    mart->add_option("--s", cfg.spin, "spin s");
    mart->add_option("--t-list", cfg.t_list, "report times");

    auto* rc = add_sub("restriction-check",
                                  "restriction martingale E[M_t(A)] flatness");
    add_common(rc, cfg);
    rc->add_option("--a", cfg.a, "slit base point");
    rc->add_option("--ell", cfg.ell, "slit height");
    rc->add_option("--t-list", cfg.t_list, "report times");

    auto* av = add_sub("avoidance", "hull avoidance frequency at kappa=8/3");
    av->add_option("--a", cfg.a, "slit base point");
    av->add_option("--ell", cfg.ell, "slit height");
    av->add_option("--n", cfg.n_samples, "number of samples");
    av->add_option("--t-max", cfg.t_max, "capacity horizon");
    av->add_option("--dt", cfg.dt, "driver step");

    auto* acc = add_sub("acceptance-suite", "run every acceptance criterion");
    (void)acc;

    CLI11_PARSE(app, argc, argv);

    cfg.experiment = app.get_subcommands().front()->get_name();
    cfg.have_h = opt_h->count() > 0 || de->get_option("--h")->count() > 0 ||
                 cfg.experiment == "eigen-check";
    cfg.have_rs = opt_r->count() > 0 && opt_s->count() > 0;
    if (cfg.experiment == "avoidance" && av->get_option("--t-max")->count() == 0)
        cfg.t_max = 8.0;

    try {
        const rsle::RunReport rep = rsle::run(cfg);
        std::cout << (cfg.json_output ? rep.json + "\n" : rep.human);
        return rep.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
