#include <cmath>

#include <doctest.h>

#include "evap/oracle.hpp"
#include "evap/timeloop.hpp"

using namespace evap;

namespace {

struct Setup {
    AxiGrid grid;
    MaterialParams params;
    DryingState drying;
    double R0;
};

Setup dim_setup(double beta = 1e-3, double rh = 0.1, int nt = 8, int nr = 16) {
    Setup s{build_grid(nt, nr, 50.0, 1.08), MaterialParams::water_air(), {}, 0.0};
    s.params.beta = beta;
    s.params.C_hk = hk_coefficient(s.params, 60.0);
    s.drying = DryingState::from_conditions(s.params, 60.0, rh);
    s.R0 = radius_from_volume_ul(1.0);
    return s;
}

Setup nondim_setup(int nt = 8, int nr = 16) {
    Setup s{build_grid(nt, nr, 50.0, 1.08), MaterialParams::unit({0.0, 1.0, 0.0, 1.0}), {}, 25.0};
    s.drying = DryingState::nondimensional(s.params);
    return s;
}

SolverConfig far_field_solver() {
    SolverConfig c;
    c.initial_fields = InitialFieldsPolicy::FarField;
    return c;
}

}  // namespace

TEST_CASE("radius update rates for uniform surface states") {
    const Setup s = dim_setup();
    SolverConfig cfg = far_field_solver();
    Simulator sim(s.grid, s.params, s.drying, Stagnant{}, cfg, s.R0);

    SimState st = sim.initial_state();
    SUBCASE("far-field fields see the maximal rate") {
        CHECK(sim.surface_J_avg(st) == doctest::Approx(s.drying.J_inf).epsilon(1e-13));
        SimState next = st;
        CHECK(sim.advance(next));
        CHECK(next.Rdot ==
              doctest::Approx(-s.drying.J_inf / s.params.rho_d).epsilon(1e-13));
        CHECK(next.R == doctest::Approx(s.R0 + cfg.dt * next.Rdot).epsilon(1e-15));
    }
    SUBCASE("half-saturated uniform surface halves the rate") {
        st.rho = Field::constant(s.grid, FieldKind::VaporDensity,
                                 0.5 * (s.drying.rho_inf + s.drying.rho_star));
        st.T = Field::constant(s.grid, FieldKind::Temperature, s.drying.T_inf);
        CHECK(sim.surface_J_avg(st) ==
              doctest::Approx(0.5 * s.drying.J_inf).epsilon(1e-13));
    }
}

TEST_CASE("saturated air is an exact equilibrium") {
    MaterialParams p = MaterialParams::water_air();
    p.beta = 1e-3;
    p.C_hk = hk_coefficient(p, 60.0);
    const DryingState d = DryingState::from_conditions(p, 60.0, 1.0);
    const AxiGrid g = build_grid(8, 16, 50.0, 1.08);
    SolverConfig cfg = far_field_solver();
    cfg.t_end = 5.0;
    Simulator sim(g, p, d, Stagnant{}, cfg, radius_from_volume_ul(1.0));
    const Trajectory t = sim.run(false);
    CHECK(t.steps.size() == 6);
    CHECK(t.final_R() == doctest::Approx(sim.R0()).epsilon(1e-12));
    // the very first implicit solve already sees a zero-residual fixed point
    CHECK(t.steps[1].mon.nonlinear_iters == 1);
    CHECK(t.steps.back().mon.T_min == 60.0);
    CHECK(t.steps.back().mon.T_max == 60.0);
}

TEST_CASE("coupled run respects the invariant monitors") {
    const Setup s = dim_setup();
    SolverConfig cfg = far_field_solver();
    cfg.t_end = 25.0;
    Simulator sim(s.grid, s.params, s.drying, Stokes{0.4}, cfg, s.R0);
    const Trajectory t = sim.run(false);  // monitors throw on violation
    const double tol_T = sim.box_tol_T();
    const double tol_rho = sim.box_tol_rho();
    double prev_R = s.R0 * (1.0 + 1e-16);
    for (const StepRecord& r : t.steps) {
        CHECK(r.R <= prev_R);
        prev_R = r.R;
        CHECK(r.mon.T_min >= s.drying.T_star - tol_T);
        CHECK(r.mon.T_max <= s.drying.T_inf + tol_T);
        CHECK(r.mon.rho_min >= s.drying.rho_inf - tol_rho);
        CHECK(r.mon.rho_max <= s.drying.rho_star + tol_rho);
        CHECK(std::abs(r.Rdot) <= s.drying.J_inf / s.params.rho_d * (1 + 1e-12));
    }
    // first-order mass bookkeeping of the volume ODE
    const double cap = 4.0 * 3.14159265358979323846 * s.params.rho_d * s.R0 *
                       std::pow(s.drying.J_inf / s.params.rho_d, 2) * (4.0 / 3.0) * cfg.dt;
    for (size_t k = 1; k < t.steps.size(); ++k)
        CHECK(t.steps[k].mon.mass_balance_err <= cap);
}

TEST_CASE("identical configs give bit-identical trajectories") {
    const Setup s = dim_setup();
    SolverConfig cfg = far_field_solver();
    cfg.t_end = 10.0;
    Simulator a(s.grid, s.params, s.drying, Stokes{0.8}, cfg, s.R0);
    Simulator b(s.grid, s.params, s.drying, Stokes{0.8}, cfg, s.R0);
    const Trajectory ta = a.run(false), tb = b.run(false);
    REQUIRE(ta.steps.size() == tb.steps.size());
    for (size_t k = 0; k < ta.steps.size(); ++k) {
        CHECK(ta.steps[k].R == tb.steps[k].R);
        CHECK(ta.steps[k].Rdot == tb.steps[k].Rdot);
        CHECK(ta.steps[k].mon.J_avg == tb.steps[k].mon.J_avg);
        CHECK(ta.steps[k].mon.T_min == tb.steps[k].mon.T_min);
    }
}

TEST_CASE("quasi-steady initial fields sit at the wet-bulb balance") {
    Setup s = dim_setup(1.0, 0.1, 32, 64);
    SolverConfig cfg;
    cfg.initial_fields = InitialFieldsPolicy::QuasiSteady;
    Simulator sim(s.grid, s.params, s.drying, Stagnant{}, cfg, s.R0);
    const SimState st = sim.initial_state();
    const D2Law law = solve_wet_bulb(s.params, s.drying);
    // the reconstructed surface temperature reproduces the wet-bulb value
    const std::vector<double> trace =
        surface_trace(st.T, s.grid, SurfaceRecon::LinearExtrapolation);
    for (double ts : trace) CHECK(ts == doctest::Approx(law.T_d).epsilon(5e-3));
    CHECK(st.mon.T_min >= s.drying.T_star);
    CHECK(st.mon.rho_max <= s.drying.rho_star);
    // and the initial evaporation rate is orders below the kinetic cap
    CHECK(st.mon.J_avg < 1e-2 * s.drying.J_inf);
    CHECK(st.mon.J_avg > 0.0);
}

TEST_CASE("run to extinction flags and extrapolates") {
    Setup s = dim_setup(1.0, 0.1, 8, 16);
    SolverConfig cfg;
    cfg.initial_fields = InitialFieldsPolicy::QuasiSteady;
    cfg.dt = 0.25;
    Simulator sim(s.grid, s.params, s.drying, Stagnant{}, cfg, 1.0e-4);  // small droplet
    const Trajectory t = sim.run(false);
    CHECK(t.extinct);
    CHECK(t.final_R() > cfg.R_min_frac * 1.0e-4);
    // at the 1% cutoff the fitted root sits within a few steps of the end
    const double life = t.extrapolated_extinction_time();
    CHECK(life > 0.8 * t.final_t());
    CHECK(life < t.final_t() + 5.0 * cfg.dt);
}

TEST_CASE("Newton and Picard solve the same nonlinear step") {
    const Setup s = nondim_setup();
    SolverConfig newton = far_field_solver();
    newton.dt = 0.5;
    newton.t_end = 2.0;
    SolverConfig picard = newton;
    picard.nonlinear_mode = NonlinearMode::PicardUL;
    Simulator a(s.grid, s.params, s.drying, Stagnant{}, newton, s.R0);
    Simulator b(s.grid, s.params, s.drying, Stagnant{}, picard, s.R0);
    const Trajectory ta = a.run(true), tb = b.run(true);
    REQUIRE(ta.T_hist.size() == tb.T_hist.size());
    for (size_t k = 0; k < ta.T_hist.size(); ++k)
        for (int c = 0; c < s.grid.n_cells(); ++c) {
            CHECK(std::abs(ta.T_hist[k].v[c] - tb.T_hist[k].v[c]) <= 1e-6);
            CHECK(std::abs(ta.rho_hist[k].v[c] - tb.rho_hist[k].v[c]) <= 1e-6);
        }
}

TEST_CASE("Newton and Picard agree in dimensional mode too") {
    // the linear-Robin iteration converges at a linear rate here (~150
    // iterations on the cold first step), Newton in a handful; the solutions
    // must coincide
    const Setup s = dim_setup(1e-3);
    SolverConfig newton = far_field_solver();
    newton.t_end = 3.0;
    SolverConfig picard = newton;
    picard.nonlinear_mode = NonlinearMode::PicardUL;
    Simulator a(s.grid, s.params, s.drying, Stagnant{}, newton, s.R0);
    Simulator b(s.grid, s.params, s.drying, Stagnant{}, picard, s.R0);
    const Trajectory ta = a.run(true), tb = b.run(true);
    REQUIRE(ta.T_hist.size() == tb.T_hist.size());
    for (size_t k = 0; k < ta.T_hist.size(); ++k)
        for (int c = 0; c < s.grid.n_cells(); ++c) {
            CHECK(std::abs(ta.T_hist[k].v[c] - tb.T_hist[k].v[c]) <=
                  1e-6 * s.drying.T_inf);
            CHECK(std::abs(ta.rho_hist[k].v[c] - tb.rho_hist[k].v[c]) <=
                  1e-6 * s.drying.rho_star);
        }
}

TEST_CASE("monotone upper/lower iterates in nondimensional Picard mode") {
    const Setup s = nondim_setup(16, 32);
    SolverConfig cfg = far_field_solver();
    cfg.nonlinear_mode = NonlinearMode::PicardUL;
    cfg.picard_start = PicardStart::UpperSolution;
    cfg.picard_min = 3;
    cfg.dt = 0.5;
    cfg.t_end = 2.5;
    Simulator sim(s.grid, s.params, s.drying, Stagnant{}, cfg, s.R0);
    const Trajectory t = sim.run(false);
    for (size_t k = 1; k < t.steps.size(); ++k) {
        CHECK(t.steps[k].mon.picard_monotone_excess <= 1e-10);
        CHECK(t.steps[k].mon.nonlinear_iters >= 3);
    }
}

TEST_CASE("Newton failure surfaces as a solver error after the dt retry") {
    const Setup s = dim_setup(1e-3);
    SolverConfig cfg = far_field_solver();
    cfg.newton_max = 1;  // nothing nontrivial converges in one iteration
    cfg.t_end = 2.0;
    Simulator sim(s.grid, s.params, s.drying, Stagnant{}, cfg, s.R0);
    CHECK_THROWS_AS(sim.run(false), SolverError);
}

TEST_CASE("stability ratio experiment") {
    const Setup s = dim_setup();
    SolverConfig cfg = far_field_solver();
    Simulator sim(s.grid, s.params, s.drying, Stagnant{}, cfg, s.R0);
    const int n = 8;
    const RadiusPath base = RadiusPath::constant(s.R0, 1.0, n);
    SUBCASE("zero perturbation has zero numerator") {
        const StabilityRatio r = stability_ratio(sim, base, base);
        CHECK(r.field_norm == 0.0);
        CHECK(r.dR_h1 == 0.0);
        CHECK(r.ratio == 0.0);
    }
    SUBCASE("a constant shift records a finite ratio") {
        RadiusPath pert = base;
        for (double& v : pert.values) v -= 0.01 * s.R0;
        const StabilityRatio r = stability_ratio(sim, base, pert);
        CHECK(r.dR_h1 > 0.0);
        CHECK(r.ratio > 0.0);
        CHECK(std::isfinite(r.ratio));
    }
    SUBCASE("ratios stay within a factor two across delta halvings") {
        std::vector<double> ratios;
        for (double eps : {0.01, 0.005, 0.0025}) {
            RadiusPath pert = base;
            for (int k = 0; k <= n; ++k)
                pert.values[k] -= eps * s.R0 * (static_cast<double>(k) / n);
            const StabilityRatio r = stability_ratio(sim, base, pert);
            CHECK(r.ratio > 0.0);
            ratios.push_back(r.ratio);
        }
        const double lo = *std::min_element(ratios.begin(), ratios.end());
        const double hi = *std::max_element(ratios.begin(), ratios.end());
        CHECK(hi / lo <= 2.0);
    }
}

TEST_CASE("prescribed paths may not touch zero") {
    const Setup s = dim_setup();
    Simulator sim(s.grid, s.params, s.drying, Stagnant{}, far_field_solver(), s.R0);
    RadiusPath bad = RadiusPath::constant(s.R0, 1.0, 4);
    bad.values[3] = 0.0;
    CHECK_THROWS_AS(sim.run_prescribed(bad, false), ConfigError);
}
