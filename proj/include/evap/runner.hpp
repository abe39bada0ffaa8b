#pragma once

#include <iosfwd>
#include <string>

#include "evap/config.hpp"
#include "evap/timeloop.hpp"

namespace evap {

struct RunOptions {
    std::string out_dir = "out";
    int snapshots_every = 0;  // 0 = no field snapshots
    bool dump_grid = false;
    double d2_tolerance = 0.05;
};

struct RunArtifacts {
    Trajectory trajectory;
    double lifetime_s = 0.0;  // extrapolated extinction time
    std::string out_dir;
};

/// Runs one simulation and writes radius.csv, run_meta.json, and optional
/// field snapshots into out_dir.
RunArtifacts run_simulation(const RunConfig& cfg, const RunOptions& opt);

int cmd_simulate(const RunConfig& cfg, const RunOptions& opt);

/// Stagnant-flow d2-law validation: least-squares R^2 slope over the first
/// 80% of the lifetime against the wet-bulb oracle.
int cmd_validate_d2law(const RunConfig& cfg, const RunOptions& opt);

/// Runs the flow-variant members concurrently and writes sweep.csv.
int cmd_sweep(const SweepConfig& cfg, const RunOptions& opt);

/// Cross-module invariant suites at desk scale, one PASS/FAIL line each.
/// When out_dir is nonempty the Volterra contraction report goes there as
/// contraction.csv.
int cmd_verify(std::ostream& os, const std::string& out_dir = "");

/// Grid-refinement table: manufactured-solution operator orders and the
/// d2-law slope error on two grids.
int cmd_convergence(const RunOptions& opt, std::ostream& os);

void write_radius_csv(const Trajectory& traj, double R0, std::ostream& os);
void write_fields_csv(const AxiGrid& grid, const Field& T, const Field& rho,
                      std::ostream& os);

}  // namespace evap
