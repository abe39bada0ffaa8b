#include "evap/timeloop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace evap {

namespace {
constexpr double kPi = 3.14159265358979323846;

double block_residual(const Eigen::VectorXd& r, int blk, int n, double denom) {
    return r.segment(blk * n, n).norm() / denom;
}
}  // namespace

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("SolverConfig: dt must be positive");
    if (!(R_min_frac > 0.0) || !(R_min_frac < 1.0))
        throw ConfigError("SolverConfig: R_min_frac must lie in (0, 1)");
    if (!(newton_tol > 0.0)) throw ConfigError("SolverConfig: newton_tol must be positive");
    if (newton_max < 1 || picard_max < 1 || picard_min < 1)
        throw ConfigError("SolverConfig: iteration budgets must be at least 1");
    if (picard_min > picard_max)
        throw ConfigError("SolverConfig: picard_min exceeds picard_max");
}

double Trajectory::extrapolated_extinction_time() const {
    const size_t n = steps.size();
    if (n < 2) return std::numeric_limits<double>::infinity();
    const size_t k = std::max<size_t>(2, n / 10);
    // least-squares line through the last k points of R^2(t)
    double st = 0, sr = 0, stt = 0, str = 0;
    for (size_t i = n - k; i < n; ++i) {
        const double t = steps[i].t;
        const double r2 = steps[i].R * steps[i].R;
        st += t;
        sr += r2;
        stt += t * t;
        str += t * r2;
    }
    const double m = (k * str - st * sr) / (k * stt - st * st);
    if (!(m < 0.0)) return std::numeric_limits<double>::infinity();
    const double c = (sr - m * st) / k;
    return -c / m;
}

RadiusPath Trajectory::radius_path() const {
    RadiusPath p;
    p.times.reserve(steps.size());
    p.values.reserve(steps.size());
    for (const StepRecord& s : steps) {
        p.times.push_back(s.t);
        p.values.push_back(s.R);
    }
    return p;
}

Simulator::Simulator(const AxiGrid& grid, MaterialParams params, DryingState drying,
                     VelocityModel model, SolverConfig config, double R0)
    : grid_(grid),
      params_(std::move(params)),
      drying_(drying),
      model_(model),
      config_(config),
      R0_(R0),
      weights_(surface_weights(grid)) {
    params_.validate();
    drying_.validate(params_);
    config_.validate();
    if (!(R0_ > 0.0)) throw ConfigError("Simulator: R0 must be positive");
}

double Simulator::box_tol_T() const {
    return 1e-8 * (drying_.T_inf - drying_.T_star + std::abs(drying_.T_inf) + 1.0);
}

double Simulator::box_tol_rho() const {
    return 1e-8 * (drying_.rho_star - drying_.rho_inf + std::abs(drying_.rho_star) + 1.0);
}

std::vector<double> Simulator::surface_J(const SimState& state) const {
    const SurfaceValues sv =
        surface_values(state.T, state.rho, grid_, config_.surface_recon);
    std::vector<double> J(grid_.n_theta);
    for (int i = 0; i < grid_.n_theta; ++i)
        J[i] = evap_rate(sv.T_s[i], sv.rho_s[i], params_);
    return J;
}

double Simulator::surface_J_avg(const SimState& state) const {
    const std::vector<double> J = surface_J(state);
    double s = 0.0;
    for (int i = 0; i < grid_.n_theta; ++i) s += weights_[i] * J[i];
    return s / (4.0 * kPi);
}

namespace {
void fill_minmax(const SimState& state, Monitors& mon) {
    mon.T_min = state.T.min_value();
    mon.T_max = state.T.max_value();
    mon.rho_min = state.rho.min_value();
    mon.rho_max = state.rho.max_value();
}
}  // namespace

SimState Simulator::initial_state() {
    SimState s;
    s.t = 0.0;
    s.R = R0_;
    s.Rdot = 0.0;
    s.step = 0;
    s.T = Field::constant(grid_, FieldKind::Temperature, drying_.T_inf);
    s.rho = Field::constant(grid_, FieldKind::VaporDensity, drying_.rho_inf);
    if (config_.initial_fields == InitialFieldsPolicy::QuasiSteady) steady_newton(s);
    fill_minmax(s, s.mon);
    s.mon.J_avg = surface_J_avg(s);
    s.mon.nonlinear_iters = 0;
    return s;
}

// Assembles the linear parts (time, diffusion, advection, far Dirichlet) of
// the two-block system around the given radius state.
static TransportSystem linear_parts(const AxiGrid& grid, const MaterialParams& params,
                                    const DryingState& drying, const VelocityModel& model,
                                    const SolverConfig& config, const SimState& state,
                                    double R_new, double Rdot, double dt) {
    TransportSystem sys =
        make_transport_system(grid, 2, R_new, Rdot, dt, config.scheme);
    const double alpha_T = params.thermal_diffusivity();
    assemble_time_term(sys, grid, state.T, 0);
    assemble_time_term(sys, grid, state.rho, 1);
    assemble_diffusion(sys, grid, alpha_T, 0);
    assemble_diffusion(sys, grid, params.D_v, 1);
    assemble_advection(sys, grid, model, params.rho_g, drying.T_inf, config.surface_recon, 0);
    assemble_advection(sys, grid, model, params.rho_g, drying.rho_inf, config.surface_recon, 1);
    apply_dirichlet_far(sys, grid, alpha_T, drying.T_inf, 0);
    apply_dirichlet_far(sys, grid, params.D_v, drying.rho_inf, 1);
    return sys;
}

void Simulator::solve_fields_newton(SimState& state, double R_new, double Rdot, double dt) {
    const int n = grid_.n_cells();
    const TransportSystem lin =
        linear_parts(grid_, params_, drying_, model_, config_, state, R_new, Rdot, dt);

    Eigen::VectorXd x(2 * n);
    for (int c = 0; c < n; ++c) {
        x[c] = state.T.v[c];
        x[n + c] = state.rho.v[c];
    }

    Field T_it = state.T, rho_it = state.rho;
    bool converged = false;
    int iters = 0;
    double denom_T = -1.0, denom_rho = -1.0;
    for (int m = 1; m <= config_.newton_max; ++m) {
        TransportSystem sys = lin;
        const SurfaceValues sv = surface_values(T_it, rho_it, grid_, config_.surface_recon);
        apply_robin_newton(sys, grid_, params_, sv, config_.surface_recon,
                           FieldKind::Temperature);
        apply_robin_newton(sys, grid_, params_, sv, config_.surface_recon,
                           FieldKind::VaporDensity);
        Eigen::SparseMatrix<double> A = sys.matrix();
        A.makeCompressed();
        iters = m;
        const Eigen::VectorXd Ax = A * x;
        if (denom_T < 0.0) {
            // residual scales fixed on the first pass; floored at the operator
            // scale so a zero right-hand-side block cannot stall the test
            denom_T = std::max({sys.rhs.segment(0, n).norm(), Ax.segment(0, n).norm(), 1e-300});
            denom_rho =
                std::max({sys.rhs.segment(n, n).norm(), Ax.segment(n, n).norm(), 1e-300});
        }
        // the linearization is exact at its own base point, so this is the
        // nonlinear residual of the current iterate
        const Eigen::VectorXd r = Ax - sys.rhs;
        if (std::max(block_residual(r, 0, n, denom_T), block_residual(r, 1, n, denom_rho)) <=
            config_.newton_tol) {
            converged = true;
            break;
        }
        x = newton_solver_.solve(A, sys.rhs);
        for (int c = 0; c < n; ++c) {
            T_it.v[c] = x[c];
            rho_it.v[c] = x[n + c];
        }
    }
    if (!converged) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "Newton did not converge in %d iterations at t=%g",
                      config_.newton_max, state.t);
        throw SolverError(buf);
    }
    state.T = T_it;
    state.rho = rho_it;
    state.mon.nonlinear_iters = iters;
    state.mon.picard_monotone_excess = 0.0;
}

void Simulator::solve_fields_picard(SimState& state, double R_new, double Rdot, double dt) {
    const int n = grid_.n_cells();
    const double alpha_T = params_.thermal_diffusivity();

    auto base_system = [&](const Field& prev, double alpha, double far) {
        TransportSystem sys = make_transport_system(grid_, 1, R_new, Rdot, dt, config_.scheme);
        assemble_time_term(sys, grid_, prev, 0);
        assemble_diffusion(sys, grid_, alpha, 0);
        assemble_advection(sys, grid_, model_, params_.rho_g, far, config_.surface_recon, 0);
        apply_dirichlet_far(sys, grid_, alpha, far, 0);
        return sys;
    };
    const TransportSystem baseT = base_system(state.T, alpha_T, drying_.T_inf);
    const TransportSystem baseR = base_system(state.rho, params_.D_v, drying_.rho_inf);

    Field T_it = state.T, rho_it = state.rho;
    if (config_.picard_start == PicardStart::UpperSolution) {
        T_it = Field::constant(grid_, FieldKind::Temperature, drying_.T_inf);
        rho_it = Field::constant(grid_, FieldKind::VaporDensity, drying_.rho_star);
    }

    double monotone_excess = 0.0;
    bool converged = false;
    int iters = 0;
    for (int k = 1; k <= config_.picard_max; ++k) {
        const SurfaceValues prev = surface_values(T_it, rho_it, grid_, config_.surface_recon);
        TransportSystem sysT = baseT;
        apply_robin_picard(sysT, grid_, params_, drying_.L, prev, config_.surface_recon,
                           FieldKind::Temperature);
        TransportSystem sysR = baseR;
        apply_robin_picard(sysR, grid_, params_, drying_.L, prev, config_.surface_recon,
                           FieldKind::VaporDensity);
        const Eigen::VectorXd xT = picard_solver_T_.solve(sysT);
        const Eigen::VectorXd xR = picard_solver_rho_.solve(sysR);

        // iterate change measured against the physical field spans
        const double scale_T =
            std::max({std::abs(drying_.T_inf), drying_.T_inf - drying_.T_star, 1e-300});
        const double scale_rho = std::max(drying_.rho_star, 1e-300);
        double rel = 0.0, jump = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < n; ++c) {
            jump = std::max({jump, xT[c] - T_it.v[c], xR[c] - rho_it.v[c]});
            rel = std::max({rel, std::abs(xT[c] - T_it.v[c]) / scale_T,
                            std::abs(xR[c] - rho_it.v[c]) / scale_rho});
        }

        for (int c = 0; c < n; ++c) {
            T_it.v[c] = xT[c];
            rho_it.v[c] = xR[c];
        }
        if (config_.picard_start == PicardStart::UpperSolution)
            monotone_excess = std::max(monotone_excess, jump);
        iters = k;
        if (k >= config_.picard_min && rel <= config_.newton_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "Picard iteration budget (%d) exhausted at t=%g",
                      config_.picard_max, state.t);
        throw SolverError(buf);
    }
    state.T = T_it;
    state.rho = rho_it;
    state.mon.nonlinear_iters = iters;
    state.mon.picard_monotone_excess =
        config_.picard_start == PicardStart::UpperSolution ? monotone_excess : 0.0;
}

void Simulator::solve_fields(SimState& state, double R_new, double Rdot, double dt) {
    SimState backup = state;
    try {
        if (config_.nonlinear_mode == NonlinearMode::Newton)
            solve_fields_newton(state, R_new, Rdot, dt);
        else
            solve_fields_picard(state, R_new, Rdot, dt);
        return;
    } catch (const SolverError&) {
        // one dt-halving retry (two sub-steps at the same radius), then loud failure
        state = backup;
        if (config_.nonlinear_mode == NonlinearMode::Newton) {
            solve_fields_newton(state, R_new, Rdot, 0.5 * dt);
            solve_fields_newton(state, R_new, Rdot, 0.5 * dt);
        } else {
            solve_fields_picard(state, R_new, Rdot, 0.5 * dt);
            solve_fields_picard(state, R_new, Rdot, 0.5 * dt);
        }
    }
}

void Simulator::steady_newton(SimState& state) {
    // dt <= 0 drops the time term: the stationary decoupled problem at R0
    solve_fields_newton(state, state.R, 0.0, 0.0);
}

void Simulator::check_step_invariants(const SimState& before, const SimState& after) const {
    const double tT = box_tol_T();
    const double tr = box_tol_rho();
    auto fail = [&](const char* what, double value) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "invariant '%s' violated at step %ld (value %.6e)",
                      what, after.step, value);
        throw InvariantViolation(buf);
    };

    // pointwise box bounds
    if (after.mon.T_min < drying_.T_star - tT) fail("T lower bound", after.mon.T_min);
    if (after.mon.T_max > drying_.T_inf + tT) fail("T upper bound", after.mon.T_max);
    if (after.mon.rho_min < drying_.rho_inf - tr) fail("rho lower bound", after.mon.rho_min);
    if (after.mon.rho_max > drying_.rho_star + tr) fail("rho upper bound", after.mon.rho_max);

    // discrete maximum principle: hull of old fields and boundary data
    if (after.mon.T_max > std::max(before.mon.T_max, drying_.T_inf) + tT)
        fail("T hull upper", after.mon.T_max);
    if (after.mon.T_min < std::min(before.mon.T_min, drying_.T_star) - tT)
        fail("T hull lower", after.mon.T_min);
    if (after.mon.rho_max > std::max(before.mon.rho_max, drying_.rho_star) + tr)
        fail("rho hull upper", after.mon.rho_max);
    if (after.mon.rho_min < std::min(before.mon.rho_min, drying_.rho_inf) - tr)
        fail("rho hull lower", after.mon.rho_min);

    // Sigma rate bound with the stated absolute slack
    const double rate_bound = drying_.J_inf / params_.rho_d;
    if (std::abs(after.Rdot) > rate_bound + 1e-12) fail("|Rdot| bound", after.Rdot);

    if (!after.T.all_finite() || !after.rho.all_finite()) fail("finite fields", 0.0);
}

bool Simulator::advance(SimState& state) {
    const std::vector<double> J = surface_J(state);
    double s = 0.0;
    for (int i = 0; i < grid_.n_theta; ++i) s += weights_[i] * J[i];
    const double Rdot = -s / (4.0 * kPi * params_.rho_d);
    const double R_new = state.R + config_.dt * Rdot;
    if (R_new <= config_.R_min_frac * R0_) return false;

    const SimState before = state;
    solve_fields(state, R_new, Rdot, config_.dt);

    state.t += config_.dt;
    state.step += 1;
    state.Rdot = Rdot;
    state.R = R_new;
    fill_minmax(state, state.mon);
    state.mon.J_avg = surface_J_avg(state);
    // first-order bookkeeping of the volume ODE against the surface integral
    const double lhs = params_.rho_d * 4.0 * kPi / 3.0 *
                       (R_new * R_new * R_new - before.R * before.R * before.R) / config_.dt;
    state.mon.mass_balance_err = std::abs(lhs + before.R * before.R * s);

    if (config_.check_invariants) {
        check_step_invariants(before, state);
        if (state.R > before.R + 1e-300)
            throw InvariantViolation("radius increased in a coupled step");
        const double mass_cap = 4.0 * kPi * params_.rho_d * R0_ *
                                std::pow(drying_.J_inf / params_.rho_d, 2) * (4.0 / 3.0);
        // floor at the rounding scale of the volume difference quotient
        const double mass_floor =
            1e-12 * params_.rho_d * 4.0 * kPi / 3.0 * R0_ * R0_ * R0_ / config_.dt;
        if (state.mon.mass_balance_err > mass_cap * config_.dt + mass_floor)
            throw InvariantViolation("mass bookkeeping error exceeds O(dt) bound");
    }
    return true;
}

void Simulator::record(Trajectory& traj, const SimState& state, bool store_fields) const {
    traj.steps.push_back({state.t, state.R, state.Rdot, state.mon});
    if (store_fields) {
        traj.T_hist.push_back(state.T);
        traj.rho_hist.push_back(state.rho);
    }
}

Trajectory Simulator::run(bool store_fields) {
    SimState state = initial_state();
    Trajectory traj;
    record(traj, state, store_fields);
    while (state.t < config_.t_end - 0.5 * config_.dt) {
        if (!advance(state)) {
            traj.extinct = true;
            break;
        }
        record(traj, state, store_fields);
    }
    return traj;
}

Trajectory Simulator::run_prescribed(const RadiusPath& path, bool store_fields) {
    if (path.min_value() <= 0.0)
        throw ConfigError("run_prescribed: path not bounded away from zero");
    const double dt = path.dt();
    SimState state = initial_state();
    state.R = path.values[0];

    Trajectory traj;
    record(traj, state, store_fields);
    for (int n = 0; n < path.n_steps(); ++n) {
        const double R_new = path.values[n + 1];
        const double Rdot = (path.values[n + 1] - path.values[n]) / dt;
        const SimState before = state;
        solve_fields(state, R_new, Rdot, dt);
        state.t = path.times[n + 1];
        state.step += 1;
        state.R = R_new;
        state.Rdot = Rdot;
        fill_minmax(state, state.mon);
        state.mon.J_avg = surface_J_avg(state);
        state.mon.mass_balance_err = 0.0;  // no radius ODE in decoupled mode
        if (config_.check_invariants) check_step_invariants(before, state);
        record(traj, state, store_fields);
    }
    return traj;
}

namespace {
// discrete Dirichlet energy sum_f (A_f / d_f) (du)^2 over interior faces
double grad_energy(const Field& u, const AxiGrid& g) {
    double e = 0.0;
    for (int i = 0; i < g.n_theta; ++i)
        for (int j = 1; j < g.n_r; ++j) {
            const double d = g.r_c[j] - g.r_c[j - 1];
            const double du = u(i, j) - u(i, j - 1);
            e += g.radial_area(i, j) / d * du * du;
        }
    for (int i = 1; i < g.n_theta; ++i) {
        const double dth = g.theta_c[i] - g.theta_c[i - 1];
        for (int j = 0; j < g.n_r; ++j) {
            const double d = g.r_c[j] * dth;
            const double du = u(i, j) - u(i - 1, j);
            e += g.polar_area(i, j) / d * du * du;
        }
    }
    return e;
}

double l2_norm(const Field& u, const AxiGrid& g) {
    double e = 0.0;
    for (int c = 0; c < g.n_cells(); ++c) e += g.vol[c] * u.v[c] * u.v[c];
    return std::sqrt(e);
}
}  // namespace

StabilityRatio stability_ratio(Simulator& sim, const RadiusPath& base,
                               const RadiusPath& perturbed) {
    const Trajectory a = sim.run_prescribed(base, true);
    const Trajectory b = sim.run_prescribed(perturbed, true);
    const AxiGrid& g = sim.grid();
    const double dt = base.dt();

    double supT = 0.0, supR = 0.0, gradT = 0.0, gradR = 0.0;
    for (size_t nrec = 0; nrec < a.T_hist.size(); ++nrec) {
        Field dT = a.T_hist[nrec];
        Field dRho = a.rho_hist[nrec];
        for (int c = 0; c < g.n_cells(); ++c) {
            dT.v[c] -= b.T_hist[nrec].v[c];
            dRho.v[c] -= b.rho_hist[nrec].v[c];
        }
        supT = std::max(supT, l2_norm(dT, g));
        supR = std::max(supR, l2_norm(dRho, g));
        if (nrec > 0) {
            gradT += dt * grad_energy(dT, g);
            gradR += dt * grad_energy(dRho, g);
        }
    }
    StabilityRatio out;
    out.field_norm = supT + supR + std::sqrt(gradT) + std::sqrt(gradR);
    out.dR_h1 = h1_distance(base, perturbed);
    out.ratio = out.dR_h1 > 0.0 ? out.field_norm / out.dR_h1 : 0.0;
    return out;
}

}  // namespace evap
