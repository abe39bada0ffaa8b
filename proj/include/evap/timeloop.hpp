#pragma once

#include <optional>
#include <vector>

#include "evap/discretization.hpp"
#include "evap/errors.hpp"
#include "evap/field.hpp"
#include "evap/flowfields.hpp"
#include "evap/physics.hpp"
#include "evap/radius_path.hpp"

namespace evap {

enum class NonlinearMode { Newton, PicardUL };
enum class InitialFieldsPolicy { FarField, QuasiSteady };
enum class PicardStart { PreviousFields, UpperSolution };

struct SolverConfig {
    double dt = 1.0;
    double t_end = 1e12;
    double R_min_frac = 0.01;  // extinction cutoff as fraction of R0
    NonlinearMode nonlinear_mode = NonlinearMode::Newton;
    double newton_tol = 1e-10;
    int newton_max = 20;
    int picard_max = 200;
    int picard_min = 1;
    Scheme scheme = Scheme::Upwind;
    InitialFieldsPolicy initial_fields = InitialFieldsPolicy::FarField;
    PicardStart picard_start = PicardStart::PreviousFields;
    SurfaceRecon surface_recon = SurfaceRecon::LinearExtrapolation;
    bool check_invariants = true;

    void validate() const;
};

struct Monitors {
    double T_min = 0.0, T_max = 0.0;
    double rho_min = 0.0, rho_max = 0.0;
    double J_avg = 0.0;  // surface average, sum(w_i J_i) / (4 pi)
    int nonlinear_iters = 0;
    double mass_balance_err = 0.0;
    /// Largest positive pointwise jump across Picard iterates; stays <= 0
    /// when the upper/lower iteration is monotone.
    double picard_monotone_excess = 0.0;
};

struct SimState {
    double t = 0.0;
    double R = 0.0;
    double Rdot = 0.0;
    long step = 0;
    Field T;
    Field rho;
    Monitors mon;
};

struct StepRecord {
    double t = 0.0, R = 0.0, Rdot = 0.0;
    Monitors mon;
};

struct Trajectory {
    std::vector<StepRecord> steps;  // includes the t = 0 record
    std::vector<Field> T_hist;      // filled when fields are stored
    std::vector<Field> rho_hist;
    bool extinct = false;

    double final_R() const { return steps.back().R; }
    double final_t() const { return steps.back().t; }
    /// Extinction time from a least-squares linear fit of R^2(t) over the
    /// last 10% of the recorded steps.
    double extrapolated_extinction_time() const;
    RadiusPath radius_path() const;
};

/// Coupled/decoupled time integrator for the rescaled system: explicit
/// radius update, implicit monolithic Newton or proof-faithful Picard field
/// solve, invariant monitors.
class Simulator {
public:
    Simulator(const AxiGrid& grid, MaterialParams params, DryingState drying,
              VelocityModel model, SolverConfig config, double R0);

    SimState initial_state();

    /// One coupled step. Returns false (state untouched) when the radius
    /// update would cross the extinction cutoff.
    bool advance(SimState& state);

    Trajectory run(bool store_fields = false);

    /// Decoupled solve with the radius prescribed by an admissible path
    /// (the solution operator S(R)); the trajectory shares the path's grid.
    Trajectory run_prescribed(const RadiusPath& path, bool store_fields = false);

    std::vector<double> surface_J(const SimState& state) const;
    double surface_J_avg(const SimState& state) const;

    const AxiGrid& grid() const { return grid_; }
    const MaterialParams& params() const { return params_; }
    const DryingState& drying() const { return drying_; }
    const SolverConfig& config() const { return config_; }
    const VelocityModel& model() const { return model_; }
    double R0() const { return R0_; }

    /// Box-bound slacks used by the invariant monitors.
    double box_tol_T() const;
    double box_tol_rho() const;

private:
    void solve_fields(SimState& state, double R_new, double Rdot, double dt);
    void solve_fields_newton(SimState& state, double R_new, double Rdot, double dt);
    void solve_fields_picard(SimState& state, double R_new, double Rdot, double dt);
    void steady_newton(SimState& state);
    void check_step_invariants(const SimState& before, const SimState& after) const;
    void record(Trajectory& traj, const SimState& state, bool store_fields) const;

    AxiGrid grid_;
    MaterialParams params_;
    DryingState drying_;
    VelocityModel model_;
    SolverConfig config_;
    double R0_;
    std::vector<double> weights_;
    SparseDirectSolver newton_solver_;
    SparseDirectSolver picard_solver_T_;
    SparseDirectSolver picard_solver_rho_;
};

struct StabilityRatio {
    double field_norm = 0.0;  // sup_t ||dT||_2 + ||grad dT||_{2,IxOmega} + rho terms
    double dR_h1 = 0.0;
    double ratio = 0.0;
};

/// Sensitivity experiment: decoupled solves for two admissible paths,
/// discrete stability ratio of field differences to ||dR||_H1.
StabilityRatio stability_ratio(Simulator& sim, const RadiusPath& base,
                               const RadiusPath& perturbed);

}  // namespace evap
