#include <cmath>
#include <sstream>

#include <doctest.h>

#include "evap/fixedpoint.hpp"
#include "evap/oracle.hpp"

using namespace evap;

namespace {

VolterraContext make_context(double beta = 1e-3, double rh = 0.1) {
    MaterialParams p = MaterialParams::water_air();
    p.beta = beta;
    p.C_hk = hk_coefficient(p, 60.0);
    const DryingState d = DryingState::from_conditions(p, 60.0, rh);
    SolverConfig cfg;
    cfg.initial_fields = InitialFieldsPolicy::FarField;
    return VolterraContext{build_grid(8, 16, 50.0, 1.08), p, d, Stagnant{}, cfg,
                           radius_from_volume_ul(1.0)};
}

}  // namespace

TEST_CASE("radius path norms and rates") {
    RadiusPath p;
    p.times = {0.0, 1.0, 2.0};
    p.values = {2.0, 1.5, 1.25};
    const std::vector<double> r = p.rates();
    CHECK(r[0] == 0.0);
    CHECK(r[1] == -0.5);
    CHECK(r[2] == -0.25);
    // sum dt (R_n^2 + Rdot_n^2) over n >= 1: (2.25+0.25) + (1.5625+0.0625)
    CHECK(p.h1_norm() == doctest::Approx(std::sqrt(4.125)).epsilon(1e-15));
    CHECK(p.min_value() == 1.25);

    const RadiusPath c = RadiusPath::constant(3.0, 0.5, 4);
    CHECK(c.times.size() == 5);
    CHECK(c.dt() == 0.5);
    CHECK(c.h1_norm() == doctest::Approx(3.0 * std::sqrt(4 * 0.5)).epsilon(1e-15));
    CHECK(h1_distance(c, c) == 0.0);
    CHECK(sup_distance(c, c) == 0.0);
}

TEST_CASE("admissibility flags") {
    const RadiusPath c = RadiusPath::constant(1.0, 1.0, 3);
    CHECK(is_admissible(c, 1.0, 0.1));
    CHECK_FALSE(is_admissible(c, 2.0, 0.1));  // wrong initial value
    RadiusPath fast = c;
    fast.values[2] = 0.5;  // rate -0.5 exceeds the bound
    CHECK_FALSE(is_admissible(fast, 1.0, 0.1));
    CHECK(is_admissible(fast, 1.0, 0.5 + 1e-9));
}

TEST_CASE("decoupled solve") {
    const VolterraContext ctx = make_context();
    const RadiusPath path = RadiusPath::constant(ctx.R0, 1.0, 5);
    SUBCASE("saturated air keeps constant fields on a constant path") {
        VolterraContext sat = make_context(1e-3, 1.0);
        const Trajectory t = decoupled_solve(sat, RadiusPath::constant(sat.R0, 1.0, 5));
        for (const StepRecord& s : t.steps) {
            CHECK(s.mon.T_min == 60.0);
            CHECK(s.mon.T_max == 60.0);
            CHECK(s.mon.J_avg == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
    SUBCASE("identical paths give identical trajectories") {
        const Trajectory a = decoupled_solve(ctx, path);
        const Trajectory b = decoupled_solve(ctx, path);
        REQUIRE(a.steps.size() == b.steps.size());
        for (size_t k = 0; k < a.steps.size(); ++k)
            CHECK(a.steps[k].mon.J_avg == b.steps[k].mon.J_avg);
    }
    SUBCASE("inadmissible paths are rejected") {
        RadiusPath bad = path;
        bad.values[0] = 0.5 * ctx.R0;
        CHECK_THROWS_AS(decoupled_solve(ctx, bad), ConfigError);
    }
}

TEST_CASE("Volterra operator") {
    const VolterraContext ctx = make_context();
    const RadiusPath input = RadiusPath::constant(ctx.R0, 1.0, 8);
    SUBCASE("saturated air maps every admissible path to the constant") {
        VolterraContext sat = make_context(1e-3, 1.0);
        const RadiusPath out = volterra_apply(sat, RadiusPath::constant(sat.R0, 1.0, 8));
        for (double v : out.values) CHECK(v == doctest::Approx(sat.R0).epsilon(1e-15));
    }
    SUBCASE("output paths are admissible and monotone") {
        const RadiusPath out = volterra_apply(ctx, input);
        CHECK(is_admissible(out, ctx.R0, ctx.rate_bound(), 1e-9));
        for (size_t n = 1; n < out.values.size(); ++n)
            CHECK(out.values[n] <= out.values[n - 1]);
        CHECK(out.values.back() < ctx.R0);
    }
}

TEST_CASE("fixed-point iteration contracts and matches the coupled run") {
    const VolterraContext ctx = make_context();
    const double bound = ctx.R0 * ctx.params.rho_d / (2.0 * ctx.drying.J_inf);
    REQUIRE(10.0 < bound);  // beta = 1e-3 makes t* = 10 s admissible

    const ContractionReport rep = picard_to_fixed_point(ctx, 10.0, 15, 1e-12);
    CHECK(rep.converged);
    REQUIRE(!rep.q.empty());
    for (double q : rep.q) CHECK(q < 1.0);
    for (size_t m = 1; m < rep.residual_h1.size(); ++m)
        CHECK(rep.residual_h1[m] <= rep.residual_h1[m - 1] * (1 + 1e-12));

    // shrinking the horizon may only improve the first contraction ratio
    const ContractionReport half = picard_to_fixed_point(ctx, 5.0, 15, 1e-12);
    REQUIRE(!half.q.empty());
    CHECK(half.q[0] <= rep.q[0] + 1e-3);

    const double sup = compare_with_coupled(ctx, rep.fixed_point);
    CHECK(sup <= std::max(ctx.solver.dt * ctx.drying.J_inf / ctx.params.rho_d, 1e-9));
}

TEST_CASE("saturated air converges in a single Volterra application") {
    VolterraContext sat = make_context(1e-3, 1.0);
    const ContractionReport rep = picard_to_fixed_point(sat, 5.0, 10, 1e-12);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.q.empty());  // no second difference to form a ratio from
    for (double v : rep.fixed_point.values) CHECK(v == sat.R0);
}

TEST_CASE("smallness precondition is enforced") {
    VolterraContext ctx = make_context(1.0);  // kinetic-scale J_inf
    CHECK_THROWS_AS(picard_to_fixed_point(ctx, 10.0, 5, 1e-12), ConfigError);
}

TEST_CASE("contraction report CSV") {
    ContractionReport rep;
    rep.residual_h1 = {1.0, 0.25};
    rep.q = {0.25};
    std::ostringstream os;
    write_contraction_csv(rep, os);
    CHECK(os.str() == "m,residual_h1,q\n1,1,\n2,0.25,0.25\n");
}
