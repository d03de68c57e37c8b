#include <CLI11.hpp>

#include "phasefeyn/cli.hpp"

int main(int argc, char** argv) {
    using phasefeyn::cli::RunConfig;
    RunConfig cfg;

    CLI::App app{"phase-space Gaussian integrand toolkit"};
    app.set_config("--config", "", "key=value configuration file (flags override it)");
    app.fallthrough();

    app.add_option("--command", cfg.command, "command to run (alternative to a subcommand)");
    app.add_option("--t-window", cfg.t_window, "evaluation window [0, t)");
    app.add_option("--t-total", cfg.t_total, "total support of the grid");
    app.add_option("--m", cfg.m, "number of grid cells");
    app.add_option("--y", cfg.y, "endpoint");
    app.add_option("--k", cfg.k, "spring constant (0 = free)");
    app.add_option("--s", cfg.s, "commutator evaluation time");
    app.add_option("--epsilon", cfg.epsilon, "commutator offset");
    app.add_option("--t", cfg.t, "propagator duration");
    app.add_option("--y-range", cfg.y_range, "sweep range start:end:step");
    app.add_option("--n-slices", cfg.n_slices, "time-slicing resolutions")->delimiter(',');
    app.add_option("--schedule", cfg.schedule, "ccr schedule: default or eps:width,...");
    app.add_option("--n-modes", cfg.n_modes, "eigenvalue count for product formulas");
    app.add_option("--suite", cfg.suite, "verify suite: identities|moments|ccr|growth|all");
    app.add_option("--seed", cfg.seed, "seed for randomized suites");
    app.add_option("--output", cfg.output, "output path (default: stdout)");
    app.add_option("--format", cfg.format, "csv or json (table commands)");
    app.add_option("--f-csv", cfg.f_csv, "test-function CSV for t-transform");
    app.add_option("--dump-matrix", cfg.dump_matrix, "debug dump of operator entries (CSV)");

    const char* commands[] = {"propagator", "t-transform", "spectrum", "determinant",
                              "verify",     "ccr",         "oracle-compare"};
    for (const char* name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->callback([&cfg, name]() { cfg.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    return phasefeyn::cli::run(cfg);
}
