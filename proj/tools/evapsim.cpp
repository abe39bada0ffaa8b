// Command-line front end: simulate | validate-d2law | verify | sweep | convergence.
// Exit codes: 0 success, 1 validation error, 2 solver failure, 3 invariant violation.

#include <iostream>

#include <CLI11.hpp>

#include "evap/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Single-droplet evaporation simulator on the rescaled spherical shell"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int snapshots = 0;
    bool seedless = false;  // documents that no RNG exists anywhere in the pipeline
    bool dump_grid = false;
    double d2_tol = 0.05;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "JSON config file");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--seedless", seedless,
                      "assert determinism (the pipeline is RNG-free by construction)");
        return cmd;
    };

    CLI::App* sim = add_common(app.add_subcommand("simulate", "run one simulation"), true);
    sim->add_option("--snapshots", snapshots, "write field snapshots every N steps");
    sim->add_flag("--dump-grid", dump_grid, "also write the grid echo CSV");

    CLI::App* d2 = add_common(
        app.add_subcommand("validate-d2law", "compare a stagnant run against the d2-law"),
        true);
    d2->add_option("--tolerance", d2_tol, "relative slope tolerance (default 0.05)");

    add_common(app.add_subcommand("verify", "run the cross-module invariant suites"), false);

    add_common(app.add_subcommand("sweep", "run flow variants and compare lifetimes"), true);

    add_common(app.add_subcommand("convergence",
                                  "refinement table for the manufactured solution and d2 slope"),
               false);

    CLI11_PARSE(app, argc, argv);

    evap::RunOptions opt;
    opt.out_dir = out_dir;
    opt.snapshots_every = snapshots;
    opt.dump_grid = dump_grid;
    opt.d2_tolerance = d2_tol;

    try {
        if (app.got_subcommand("simulate"))
            return evap::cmd_simulate(evap::RunConfig::load_file(config_path), opt);
        if (app.got_subcommand("validate-d2law"))
            return evap::cmd_validate_d2law(evap::RunConfig::load_file(config_path), opt);
        if (app.got_subcommand("verify")) return evap::cmd_verify(std::cout, out_dir);
        if (app.got_subcommand("sweep"))
            return evap::cmd_sweep(evap::SweepConfig::load_file(config_path), opt);
        if (app.got_subcommand("convergence")) return evap::cmd_convergence(opt, std::cout);
    } catch (const evap::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const evap::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const evap::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
