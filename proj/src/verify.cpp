#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "evap/fixedpoint.hpp"
#include "evap/oracle.hpp"
#include "evap/runner.hpp"

namespace evap {

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw CheckFailure(msg);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// shared desk-scale fixtures -------------------------------------------------

MaterialParams dim_params(double beta, double T_inf) {
    MaterialParams p = MaterialParams::water_air();
    p.beta = beta;
    p.C_hk = hk_coefficient(p, T_inf);
    return p;
}

struct DimSetup {
    AxiGrid grid;
    MaterialParams params;
    DryingState drying;
    double R0;
};

DimSetup dim_setup(double beta = 1e-3, int nt = 16, int nr = 32) {
    DimSetup s{build_grid(nt, nr, 50.0, 1.08), dim_params(beta, 60.0), {}, 0.0};
    s.drying = DryingState::from_conditions(s.params, 60.0, 0.1);
    s.R0 = radius_from_volume_ul(1.0);
    return s;
}

struct NonDimSetup {
    AxiGrid grid;
    MaterialParams params;
    DryingState drying;
    double R0 = 25.0;
};

NonDimSetup nondim_setup(int nt = 16, int nr = 32) {
    NonDimSetup s{build_grid(nt, nr, 50.0, 1.08),
                  MaterialParams::unit({0.0, 1.0, 0.0, 1.0}),
                  {}};
    s.drying = DryingState::nondimensional(s.params);
    return s;
}

SolverConfig quick_solver() {
    SolverConfig c;
    c.dt = 1.0;
    c.initial_fields = InitialFieldsPolicy::FarField;
    return c;
}

// checks ----------------------------------------------------------------------

void check_saturation_monotone() {
    MaterialParams p = MaterialParams::water_air();
    double prev_p = p_sat(0.0), prev_r = rho_sat(0.0, p);
    for (int k = 1; k <= 1000; ++k) {
        const double T = 100.0 * k / 1000.0;
        const double cp = p_sat(T), cr = rho_sat(T, p);
        require(cp > prev_p && cr > prev_r,
                "saturation curve not strictly increasing at T=" + num(T));
        prev_p = cp;
        prev_r = cr;
    }
}

void check_lipschitz_bound() {
    const DimSetup s = dim_setup();
    for (int k = 0; k <= 1000; ++k) {
        const double T = s.drying.T_star + (s.drying.T_inf - s.drying.T_star) * k / 1000.0;
        const double d = drho_sat_dT(T, s.params);
        require(d >= 0.0 && d <= s.drying.L,
                "drho_sat/dT outside [0, L] at T=" + num(T));
    }
}

void check_evap_rate_box() {
    const DimSetup s = dim_setup(1.0);
    for (int a = 0; a <= 20; ++a) {
        for (int b = 0; b <= 20; ++b) {
            const double T = s.drying.T_star + (s.drying.T_inf - s.drying.T_star) * a / 20.0;
            const double rho =
                s.drying.rho_inf + (s.drying.rho_star - s.drying.rho_inf) * b / 20.0;
            const double J = evap_rate(T, rho, s.params);
            require(std::abs(J) <= s.drying.J_inf * (1.0 + 1e-12),
                    "|J| exceeds J_inf on the box");
            if (rho <= rho_sat(T, s.params))
                require(J >= 0.0 && J <= s.drying.J_inf * (1.0 + 1e-12),
                        "J outside [0, J_inf] on the admissible sub-box");
        }
    }
}

void check_hk_scaling() {
    MaterialParams p = MaterialParams::water_air();
    const double c1 = hk_coefficient(p, 60.0);
    p.beta = 0.5;
    require(hk_coefficient(p, 60.0) == 0.5 * c1, "C_hk not linear in beta");
    p.beta = 1.0;
    const double c2 = hk_coefficient(p, (60.0 + 273.15) * 4.0 - 273.15);
    require(std::abs(c2 - 2.0 * c1) <= 1e-12 * c1, "C_hk not sqrt in absolute T");
}

void check_grid_measures() {
    const AxiGrid g = build_grid(32, 64, 50.0, 1.0025);
    require(std::abs(g.total_volume() - g.exact_volume()) <= 1e-12 * g.exact_volume(),
            "cell volumes do not partition the shell");
    const std::vector<double> w = surface_weights(g);
    double sw = 0.0, sc = 0.0;
    for (int i = 0; i < g.n_theta; ++i) {
        sw += w[i];
        sc += w[i] * std::cos(g.theta_c[i]);
    }
    const double fourpi = 4.0 * 3.14159265358979323846;
    require(std::abs(sw - fourpi) <= 1e-12 * fourpi, "surface weights do not sum to 4*pi");
    require(std::abs(sc) <= 1e-14, "cos(theta) quadrature not zero: " + num(sc));
    for (int j = 0; j < g.n_r; ++j)
        require(g.polar_area(0, j) == 0.0 && g.polar_area(g.n_theta, j) == 0.0,
                "axis faces carry area");
}

void check_grid_determinism() {
    const AxiGrid a = build_grid(24, 48, 50.0, 1.05);
    const AxiGrid b = build_grid(24, 48, 50.0, 1.05);
    require(a.r_faces == b.r_faces && a.theta_faces == b.theta_faces && a.vol == b.vol,
            "grid construction not bit-deterministic");
}

void check_flow_tangency() {
    const AxiGrid g = build_grid(16, 32, 50.0, 1.08);
    const VelocityModel models[] = {Stagnant{}, Stokes{0.4},
                                    Acoustic{3981.0, 2 * 3.14159265358979323846 * 58000.0, 343.0}};
    for (const auto& m : models)
        for (double th : g.theta_c)
            require(flow_eval(m, th, 1.0, 6.2e-4, 1.060).v_r == 0.0,
                    "v_r not exactly zero on the droplet surface");
}

void check_flow_divergence() {
    const AxiGrid g = build_grid(32, 64, 50.0, 1.08);
    const double R = 6.2e-4;
    require(check_divergence(VelocityModel{Stagnant{}}, g, R, 1.060) == 0.0,
            "stagnant divergence nonzero");
    const double ds = check_divergence(VelocityModel{Stokes{0.8}}, g, R, 1.060);
    require(ds <= 1e-6, "Stokes divergence " + num(ds));
    const double da = check_divergence(
        VelocityModel{Acoustic{3981.0, 2 * 3.14159265358979323846 * 58000.0, 343.0}}, g, R,
        1.060);
    require(da <= 1e-6, "acoustic divergence " + num(da));
}

void check_stokes_far_field() {
    // polar tail 3/(4r) stays under 2% at r=50; the radial tail 3/(2r) is
    // exactly twice that
    const Stokes s{0.4};
    for (double th : {0.3, 1.0, 2.0, 2.8}) {
        const FlowSample v = flow_eval(s, th, 50.0, 1.0, 1.0);
        require(std::abs(v.v_theta - (-s.v_inf * std::sin(th))) <= 0.02 * s.v_inf,
                "Stokes polar far-field tail exceeds 2% at r=50");
        require(std::abs(v.v_r - s.v_inf * std::cos(th)) <= 0.04 * s.v_inf,
                "Stokes radial far-field tail exceeds 4% at r=50");
    }
}

void check_acoustic_scaling() {
    const AxiGrid g = build_grid(8, 16, 50.0, 1.08);
    const double om = 2 * 3.14159265358979323846 * 58000.0;
    const Acoustic a1{2000.0, om, 343.0}, a2{4000.0, om, 343.0};
    const double R = 6e-4, rho_g = 1.060;
    for (int i = 0; i < g.n_theta; i += 3) {
        for (int j = 0; j < g.n_r; j += 5) {
            const FlowSample v1 = flow_eval(a1, g.theta_c[i], g.r_c[j], R, rho_g);
            const FlowSample v2 = flow_eval(a2, g.theta_c[i], g.r_c[j], R, rho_g);
            require(std::abs(v2.v_theta - 4.0 * v1.v_theta) <= 1e-12 * std::abs(v2.v_theta) + 1e-300 &&
                        std::abs(v2.v_r - 4.0 * v1.v_r) <= 1e-12 * std::abs(v2.v_r) + 1e-300,
                    "acoustic field does not scale as A^2");
            const FlowSample vh = flow_eval(a1, g.theta_c[i], g.r_c[j], 2.0 * R, rho_g);
            require(std::abs(v1.v_theta - 2.0 * vh.v_theta) <= 1e-12 * std::abs(v1.v_theta) + 1e-300,
                    "acoustic field does not scale as 1/R");
        }
    }
    // Lipschitz-in-R ratios against the closed-form derivative of the prefactor
    const double R1 = 0.6e-3;
    double shape_max = 0.0;
    for (int i = 0; i < g.n_theta; ++i)
        for (int j = 0; j < g.n_r; ++j) {
            const FlowSample v = flow_eval(a1, g.theta_c[i], g.r_c[j], R1, rho_g);
            const double K = acoustic_prefactor(a1, R1, rho_g);
            shape_max = std::max({shape_max, std::abs(v.v_theta) / K, std::abs(v.v_r) / K});
        }
    const double expect = acoustic_prefactor(a1, R1, rho_g) / R1 * shape_max;
    for (double dR : {1e-5, 1e-6, 1e-7}) {
        const double ratio = lipschitz_in_R(a1, R1, R1 - dR, g, rho_g) / dR;
        require(ratio <= 1.1 * expect && ratio >= expect / 1.1,
                "acoustic Lipschitz ratio off the derivative oracle");
    }
    require(lipschitz_in_R(VelocityModel{Stokes{0.4}}, 1e-3, 2e-3, g, rho_g) == 0.0,
            "Stokes field depends on R");
}

void check_diffusion_symmetry() {
    const AxiGrid g = build_grid(16, 32, 50.0, 1.08);
    TransportSystem sys = make_transport_system(g, 1, 0.5, 0.0, 0.0, Scheme::Upwind);
    assemble_diffusion(sys, g, 2.5, 0);
    const Eigen::SparseMatrix<double> A = sys.matrix();
    Eigen::SparseMatrix<double> D = Eigen::SparseMatrix<double>(A.transpose()) - A;
    const double asym = D.coeffs().abs().maxCoeff();
    const double scale = A.coeffs().abs().maxCoeff();
    require(asym <= 1e-12 * scale, "diffusion matrix not symmetric: " + num(asym / scale));
}

void check_constant_kernel() {
    const DimSetup s = dim_setup();
    TransportSystem sys = make_transport_system(s.grid, 1, s.R0, -1e-5, 0.0, Scheme::Upwind);
    assemble_diffusion(sys, s.grid, 1.0, 0);
    assemble_advection(sys, s.grid, Stokes{0.4}, s.params.rho_g, 1.0,
                       SurfaceRecon::LinearExtrapolation, 0);
    const Field u = Field::constant(s.grid, FieldKind::Temperature, 1.0);
    const Eigen::Map<const Eigen::VectorXd> x(u.v.data(), s.grid.n_cells());
    const Eigen::SparseMatrix<double> A = sys.matrix();
    const Eigen::VectorXd r = A * x;
    // row-scale-relative: the raw coefficients carry alpha/R^2 ~ 1e6
    Eigen::VectorXd scale = Eigen::VectorXd::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            scale[it.row()] += std::abs(it.value());
    // rows away from the outer boundary see no data terms: residual is zero
    for (int i = 0; i < s.grid.n_theta; ++i)
        for (int j = 0; j < s.grid.n_r - 1; ++j) {
            const int c = s.grid.cell(i, j);
            require(std::abs(r[c]) <= 1e-12 * scale[c],
                    "constant field has nonzero interior residual");
        }
}

void check_advection_negation() {
    const AxiGrid g = build_grid(12, 24, 50.0, 1.08);
    auto assemble = [&](double vinf) {
        TransportSystem sys = make_transport_system(g, 1, 1.0, 0.0, 0.0, Scheme::Central);
        assemble_advection(sys, g, Stokes{vinf}, 1.0, 0.0, SurfaceRecon::LinearExtrapolation, 0);
        Eigen::SparseMatrix<double> A = sys.matrix();
        A.makeCompressed();
        return A;
    };
    const Eigen::SparseMatrix<double> plus = assemble(0.3);
    const Eigen::SparseMatrix<double> minus = assemble(-0.3);
    const double scale = plus.coeffs().abs().maxCoeff();
    Eigen::SparseMatrix<double> sum = plus + minus;
    const double diff = sum.nonZeros() == 0 ? 0.0 : sum.coeffs().abs().maxCoeff();
    require(diff <= 1e-14 * scale, "advective entries do not negate with the field");
}

void check_upwind_ale_sign() {
    const DimSetup s = dim_setup();
    const AdvectiveFluxes f =
        advective_fluxes(s.grid, Stagnant{}, s.params.rho_g, s.R0, -1e-5);
    for (double phi : f.phi_r)
        require(phi > 0.0, "ALE face flux not outward for a shrinking droplet");
}

void check_m_matrix_systems() {
    // dimensional Newton monolithic blocks and nondimensional Picard systems
    const DimSetup s = dim_setup(1.0);
    const Field T0 = Field::constant(s.grid, FieldKind::Temperature, s.drying.T_inf);
    const Field r0 = Field::constant(s.grid, FieldKind::VaporDensity, s.drying.rho_inf);
    TransportSystem sys = make_transport_system(s.grid, 2, s.R0, -1e-5, 1.0, Scheme::Upwind);
    assemble_time_term(sys, s.grid, T0, 0);
    assemble_time_term(sys, s.grid, r0, 1);
    assemble_diffusion(sys, s.grid, s.params.thermal_diffusivity(), 0);
    assemble_diffusion(sys, s.grid, s.params.D_v, 1);
    assemble_advection(sys, s.grid, Stokes{0.8}, s.params.rho_g, s.drying.T_inf,
                       SurfaceRecon::LinearExtrapolation, 0);
    assemble_advection(sys, s.grid, Stokes{0.8}, s.params.rho_g, s.drying.rho_inf,
                       SurfaceRecon::LinearExtrapolation, 1);
    apply_dirichlet_far(sys, s.grid, s.params.thermal_diffusivity(), s.drying.T_inf, 0);
    apply_dirichlet_far(sys, s.grid, s.params.D_v, s.drying.rho_inf, 1);
    const SurfaceValues sv = surface_values(T0, r0, s.grid, SurfaceRecon::LinearExtrapolation);
    apply_robin_newton(sys, s.grid, s.params, sv, SurfaceRecon::LinearExtrapolation,
                       FieldKind::Temperature);
    apply_robin_newton(sys, s.grid, s.params, sv, SurfaceRecon::LinearExtrapolation,
                       FieldKind::VaporDensity);
    const MMatrixReport rep = audit_m_matrix_blocks(sys);
    require(rep.ok, "Newton block M-matrix audit failed: " + rep.first_failure);

    const NonDimSetup n = nondim_setup();
    const Field Tn = Field::constant(n.grid, FieldKind::Temperature, 1.0);
    TransportSystem pic = make_transport_system(n.grid, 1, n.R0, -0.5, 1.0, Scheme::Upwind);
    assemble_time_term(pic, n.grid, Tn, 0);
    assemble_diffusion(pic, n.grid, 1.0, 0);
    assemble_advection(pic, n.grid, Stagnant{}, 1.0, 1.0, SurfaceRecon::LinearExtrapolation, 0);
    apply_dirichlet_far(pic, n.grid, 1.0, 1.0, 0);
    const SurfaceValues svn{std::vector<double>(n.grid.n_theta, 1.0),
                            std::vector<double>(n.grid.n_theta, 1.0)};
    apply_robin_picard(pic, n.grid, n.params, n.drying.L, svn,
                       SurfaceRecon::LinearExtrapolation, FieldKind::Temperature);
    const MMatrixReport rp = audit_m_matrix_blocks(pic);
    require(rp.ok, "Picard M-matrix audit failed: " + rp.first_failure);
}

void check_coupled_run_invariants() {
    const DimSetup s = dim_setup();
    SolverConfig cfg = quick_solver();
    cfg.t_end = 30.0;
    Simulator sim(s.grid, s.params, s.drying, Stokes{0.4}, cfg, s.R0);
    const Trajectory a = sim.run(false);  // monitors throw on any violation
    Simulator sim2(s.grid, s.params, s.drying, Stokes{0.4}, cfg, s.R0);
    const Trajectory b = sim2.run(false);
    require(a.steps.size() == b.steps.size(), "trajectory lengths differ across reruns");
    for (size_t k = 0; k < a.steps.size(); ++k)
        require(a.steps[k].R == b.steps[k].R && a.steps[k].mon.J_avg == b.steps[k].mon.J_avg,
                "trajectory not bit-deterministic");
    require(a.steps.back().R < s.R0, "droplet did not shrink");
}

void check_saturated_air_equilibrium() {
    MaterialParams p = dim_params(1e-3, 60.0);
    const DryingState d = DryingState::from_conditions(p, 60.0, 1.0);
    const AxiGrid g = build_grid(16, 32, 50.0, 1.08);
    SolverConfig cfg = quick_solver();
    cfg.t_end = 10.0;
    const double R0 = radius_from_volume_ul(1.0);
    Simulator sim(g, p, d, Stagnant{}, cfg, R0);
    const Trajectory t = sim.run(false);
    require(std::abs(t.final_R() - R0) <= 1e-12 * R0, "saturated air moved the radius");
    require(t.steps.back().mon.T_min == 60.0 && t.steps.back().mon.T_max == 60.0,
            "saturated air perturbed the temperature field");
}

void check_volterra_contraction() {
    const DimSetup s = dim_setup();
    VolterraContext ctx{s.grid, s.params, s.drying, Stagnant{}, quick_solver(), s.R0};
    const ContractionReport rep = picard_to_fixed_point(ctx, 8.0, 12, 1e-12);
    require(rep.converged, "Volterra iteration did not converge");
    for (double q : rep.q) require(q < 1.0, "contraction ratio q = " + num(q) + " >= 1");
    for (size_t m = 1; m < rep.residual_h1.size(); ++m)
        require(rep.residual_h1[m] <= rep.residual_h1[m - 1] * (1.0 + 1e-12),
                "fixed-point residual increased");
    const ContractionReport rep2 = picard_to_fixed_point(ctx, 4.0, 12, 1e-12);
    require(!rep.q.empty() && !rep2.q.empty(), "no contraction ratios recorded");
    require(rep2.q[0] <= rep.q[0] + 1e-3, "halving t_star increased q_1");
    const double sup = compare_with_coupled(ctx, rep.fixed_point);
    const double tol = std::max(ctx.solver.dt * s.drying.J_inf / s.params.rho_d, 1e-9);
    require(sup <= tol, "fixed point vs coupled run: " + num(sup) + " > " + num(tol));
}

void check_monotone_picard() {
    const NonDimSetup s = nondim_setup();
    SolverConfig cfg = quick_solver();
    cfg.nonlinear_mode = NonlinearMode::PicardUL;
    cfg.picard_start = PicardStart::UpperSolution;
    cfg.picard_min = 3;
    cfg.dt = 0.5;
    cfg.t_end = 3.0;
    Simulator sim(s.grid, s.params, s.drying, Stagnant{}, cfg, s.R0);
    const Trajectory t = sim.run(false);
    for (const StepRecord& r : t.steps)
        require(r.mon.picard_monotone_excess <= 1e-10,
                "iterates not monotone, excess " + num(r.mon.picard_monotone_excess));
}

void check_picard_newton_equivalence() {
    const NonDimSetup s = nondim_setup(8, 16);
    SolverConfig newton = quick_solver();
    newton.dt = 0.5;
    newton.t_end = 2.0;
    SolverConfig picard = newton;
    picard.nonlinear_mode = NonlinearMode::PicardUL;
    Simulator a(s.grid, s.params, s.drying, Stagnant{}, newton, s.R0);
    Simulator b(s.grid, s.params, s.drying, Stagnant{}, picard, s.R0);
    const Trajectory ta = a.run(true), tb = b.run(true);
    for (size_t k = 0; k < ta.T_hist.size(); ++k)
        for (int c = 0; c < s.grid.n_cells(); ++c) {
            require(std::abs(ta.T_hist[k].v[c] - tb.T_hist[k].v[c]) <= 1e-6,
                    "Newton and Picard temperature fields disagree");
            require(std::abs(ta.rho_hist[k].v[c] - tb.rho_hist[k].v[c]) <= 1e-6,
                    "Newton and Picard vapor fields disagree");
        }
}

void check_stability_ratios() {
    const DimSetup s = dim_setup();
    VolterraContext ctx{s.grid, s.params, s.drying, Stagnant{}, quick_solver(), s.R0};
    const int n = 10;
    const RadiusPath base = RadiusPath::constant(s.R0, 1.0, n);
    Simulator sim(ctx.grid, ctx.params, ctx.drying, ctx.model, ctx.solver, ctx.R0);
    std::vector<double> ratios;
    for (double eps : {0.01, 0.005, 0.0025}) {
        RadiusPath pert = base;
        for (int k = 0; k <= n; ++k)
            pert.values[k] -= eps * s.R0 * (static_cast<double>(k) / n);  // ramp, dR(0)=0
        ratios.push_back(stability_ratio(sim, base, pert).ratio);
    }
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    require(lo > 0.0 && hi / lo <= 2.0,
            "stability ratios spread by more than a factor 2: " + num(hi / lo));
}

void check_wet_bulb() {
    const DimSetup s = dim_setup(1.0);
    const D2Law law = solve_wet_bulb(s.params, s.drying);
    require(law.T_d > s.drying.T_star && law.T_d < s.drying.T_inf,
            "wet-bulb temperature outside (T_star, T_inf)");
    const double lhs = rho_sat(law.T_d, s.params) - s.drying.rho_inf;
    const double rhs = s.params.k_g / (s.params.D_v * s.params.Lambda) *
                       (s.drying.T_inf - law.T_d);
    require(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs),
            "wet-bulb equation residual " + num((lhs - rhs) / rhs));
    double prev = -1e9;
    for (double rh : {0.1, 0.3, 0.5}) {
        const DryingState d = DryingState::from_conditions(s.params, 60.0, rh);
        const double td = solve_wet_bulb(s.params, d).T_d;
        require(td > prev, "T_d not increasing in RH");
        prev = td;
    }
    for (double R0 : {1e-4, 3e-4, 9e-4})
        require(std::abs(law.lifetime(R0) - R0 * R0 / -law.slope) == 0.0,
                "lifetime does not scale as R0^2");
}

void check_mutation_robin_sign() {
    // a flipped evaporative-cooling sign must drive the one-step solution
    // out of the admissible box; the unmutated assembly must stay inside it
    const DimSetup s = dim_setup(1.0);
    const Field T0 = Field::constant(s.grid, FieldKind::Temperature, s.drying.T_inf);
    const Field r0 = Field::constant(s.grid, FieldKind::VaporDensity, s.drying.rho_inf);
    auto box_violation = [&](double sign) {
        TransportSystem sys = make_transport_system(s.grid, 2, s.R0, 0.0, 1.0, Scheme::Upwind);
        assemble_time_term(sys, s.grid, T0, 0);
        assemble_time_term(sys, s.grid, r0, 1);
        assemble_diffusion(sys, s.grid, s.params.thermal_diffusivity(), 0);
        assemble_diffusion(sys, s.grid, s.params.D_v, 1);
        apply_dirichlet_far(sys, s.grid, s.params.thermal_diffusivity(), s.drying.T_inf, 0);
        apply_dirichlet_far(sys, s.grid, s.params.D_v, s.drying.rho_inf, 1);
        const SurfaceValues sv =
            surface_values(T0, r0, s.grid, SurfaceRecon::LinearExtrapolation);
        RobinOptions opts;
        opts.temperature_flux_sign = sign;
        apply_robin_newton(sys, s.grid, s.params, sv, SurfaceRecon::LinearExtrapolation,
                           FieldKind::Temperature, opts);
        apply_robin_newton(sys, s.grid, s.params, sv, SurfaceRecon::LinearExtrapolation,
                           FieldKind::VaporDensity);
        const Eigen::VectorXd x = solve_sparse(sys);
        const int n = s.grid.n_cells();
        double v = 0.0;
        for (int c = 0; c < n; ++c) {
            v = std::max({v, s.drying.T_star - x[c], x[c] - s.drying.T_inf,
                          s.drying.rho_inf - x[n + c], x[n + c] - s.drying.rho_star});
        }
        return v;
    };
    const double tol = 1e-8 * s.drying.rho_star;
    require(box_violation(-1.0) > tol,
            "mutated boundary row was not caught by the maximum-principle box");
    require(box_violation(+1.0) <= tol, "unmutated assembly tripped the box audit");
}

void check_mutation_divergence() {
    const AxiGrid g = build_grid(8, 16, 50.0, 1.08);
    const double d = check_divergence(
        [](double, double r) { return FlowSample{0.0, r}; }, g, 1.0);
    require(d > 1e-6, "non-solenoidal field passed the divergence validator");
}

struct Check {
    const char* name;
    std::function<void()> fn;
};

}  // namespace

int cmd_verify(std::ostream& os, const std::string& out_dir) {
    const std::vector<Check> checks = {
        {"physics.saturation_monotone", check_saturation_monotone},
        {"physics.lipschitz_bound", check_lipschitz_bound},
        {"physics.evap_rate_box", check_evap_rate_box},
        {"physics.hk_scaling", check_hk_scaling},
        {"geometry.measures", check_grid_measures},
        {"geometry.determinism", check_grid_determinism},
        {"flowfields.tangency", check_flow_tangency},
        {"flowfields.divergence", check_flow_divergence},
        {"flowfields.stokes_far_field", check_stokes_far_field},
        {"flowfields.acoustic_scaling", check_acoustic_scaling},
        {"discretization.diffusion_symmetry", check_diffusion_symmetry},
        {"discretization.constant_kernel", check_constant_kernel},
        {"discretization.advection_negation", check_advection_negation},
        {"discretization.upwind_ale_sign", check_upwind_ale_sign},
        {"discretization.m_matrix", check_m_matrix_systems},
        {"timeloop.coupled_invariants", check_coupled_run_invariants},
        {"timeloop.saturated_air", check_saturated_air_equilibrium},
        {"timeloop.monotone_picard", check_monotone_picard},
        {"timeloop.picard_newton_equivalence", check_picard_newton_equivalence},
        {"timeloop.stability_ratios", check_stability_ratios},
        {"fixedpoint.volterra_contraction", check_volterra_contraction},
        {"oracle.wet_bulb", check_wet_bulb},
        {"mutation.robin_sign_flip", check_mutation_robin_sign},
        {"mutation.divergence_validator", check_mutation_divergence},
    };

    int failed = 0;
    for (const Check& c : checks) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.fn();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        char line[256];
        if (error.empty()) {
            std::snprintf(line, sizeof line, "PASS  %-42s %8.1f ms\n", c.name, ms);
        } else {
            std::snprintf(line, sizeof line, "FAIL  %-42s %8.1f ms  %s\n", c.name, ms,
                          error.c_str());
            ++failed;
        }
        os << line;
    }
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        const DimSetup s = dim_setup();
        const VolterraContext ctx{s.grid, s.params, s.drying, Stagnant{}, quick_solver(), s.R0};
        ContractionReport rep = picard_to_fixed_point(ctx, 8.0, 12, 1e-12);
        rep.sup_diff_vs_coupled = compare_with_coupled(ctx, rep.fixed_point);
        std::ofstream csv(out_dir + "/contraction.csv");
        write_contraction_csv(rep, csv);
        double qmax = 0.0;
        for (double q : rep.q) qmax = std::max(qmax, q);
        os << "contraction report: " << rep.iterations << " iterations, max q = " << qmax
           << ", sup |fixed point - coupled| = " << rep.sup_diff_vs_coupled << " m"
           << (rep.converged && qmax < 1.0 ? " PASS" : " FAIL") << " -> " << out_dir
           << "/contraction.csv\n";
    }
    os << (failed == 0 ? "verify: all checks passed\n"
                       : "verify: " + std::to_string(failed) + " check(s) failed\n");
    return failed == 0 ? 0 : 3;
}

}  // namespace evap
