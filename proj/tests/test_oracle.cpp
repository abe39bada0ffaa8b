#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "evap/field.hpp"
#include "evap/oracle.hpp"

using namespace evap;

namespace {
MaterialParams frozen_params() {
    MaterialParams p = MaterialParams::water_air();
    p.C_hk = hk_coefficient(p, 60.0);
    return p;
}
}  // namespace

TEST_CASE("droplet radius from volume") {
    // 1 ul of liquid: (3e-9 / (4 pi))^(1/3)
    CHECK(radius_from_volume_ul(1.0) ==
          doctest::Approx(0.0006203504908994003).epsilon(1e-14));
    CHECK_THROWS_AS(radius_from_volume_ul(0.0), std::invalid_argument);
}

TEST_CASE("wet-bulb temperature") {
    const MaterialParams p = frozen_params();
    SUBCASE("saturated air degenerates to zero slope") {
        const DryingState d = DryingState::from_conditions(p, 60.0, 1.0);
        const D2Law law = solve_wet_bulb(p, d);
        CHECK(law.T_d == 60.0);
        CHECK(law.slope == 0.0);
        CHECK(std::isinf(law.lifetime(1e-3)));
    }
    SUBCASE("frozen bisection value for the reference conditions") {
        const DryingState d = DryingState::from_conditions(p, 60.0, 0.1);
        const D2Law law = solve_wet_bulb(p, d);
        CHECK(law.T_d == doctest::Approx(27.284314982850496).epsilon(1e-10));
        CHECK(law.slope == doctest::Approx(-7.924220136530576e-10).epsilon(1e-10));
        CHECK(law.T_d > d.T_star);
        CHECK(law.T_d < d.T_inf);
        // the defining balance holds after back-substitution
        const double lhs = rho_sat(law.T_d, p) - d.rho_inf;
        const double rhs = p.k_g / (p.D_v * p.Lambda) * (d.T_inf - law.T_d);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        // endpoint signs bracket the root
        CHECK(rho_sat(d.T_star, p) - d.rho_inf -
                  p.k_g / (p.D_v * p.Lambda) * (d.T_inf - d.T_star) <
              0.0);
        CHECK(rho_sat(d.T_inf, p) - d.rho_inf > 0.0);
    }
    SUBCASE("monotone in relative humidity") {
        double prev = -1e9;
        for (double rh : {0.1, 0.3, 0.5}) {
            const DryingState d = DryingState::from_conditions(p, 60.0, rh);
            const double td = solve_wet_bulb(p, d).T_d;
            CHECK(td > prev);
            prev = td;
        }
    }
}

TEST_CASE("d2 radius-squared decay") {
    const MaterialParams p = frozen_params();
    const DryingState d = DryingState::from_conditions(p, 60.0, 0.1);
    const D2Law law = solve_wet_bulb(p, d);
    const double R0 = radius_from_volume_ul(1.0);
    CHECK(d2_radius_sq(0.0, R0, law) == R0 * R0);
    CHECK(d2_radius_sq(law.lifetime(R0), R0, law) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d2_radius_sq(2.0 * law.lifetime(R0), R0, law) == 0.0);  // clamped
    CHECK_THROWS_AS(d2_radius_sq(-1.0, R0, law), std::invalid_argument);
    // lifetime scales exactly as R0^2
    for (double r : {1e-4, 3e-4, 9e-4})
        CHECK(law.lifetime(r) == r * r / -law.slope);
}

TEST_CASE("harmonic profile sampling and trace reconstruction") {
    SUBCASE("zero curvature term gives a constant field") {
        const AxiGrid g = build_grid(8, 16, 50.0, 1.0);
        const Field f = harmonic_profile(g, 3.0, 0.0);
        CHECK(f.min_value() == 3.0);
        CHECK(f.max_value() == 3.0);
    }
    SUBCASE("surface trace extrapolation is second order in the layer width") {
        const double a = 1.0, b = 2.0;
        double prev = 0.0;
        for (int level = 0; level < 3; ++level) {
            const AxiGrid g = build_grid(4, 16 << level, 2.0, 1.0);
            const Field f = harmonic_profile(g, a, b);
            const std::vector<double> tr =
                surface_trace(f, g, SurfaceRecon::LinearExtrapolation);
            const double err = std::abs(tr[0] - (a + b));
            if (level > 0) CHECK(std::log2(prev / err) >= 1.9);
            prev = err;
        }
    }
    SUBCASE("affine fields are reconstructed exactly") {
        const AxiGrid g = build_grid(4, 16, 50.0, 1.0);
        Field f = Field::constant(g, FieldKind::Temperature, 0.0);
        for (int i = 0; i < g.n_theta; ++i)
            for (int j = 0; j < g.n_r; ++j) f(i, j) = 2.0 + 3.0 * g.r_c[j];
        const std::vector<double> tr =
            surface_trace(f, g, SurfaceRecon::LinearExtrapolation);
        for (double v : tr) CHECK(v == doctest::Approx(5.0).epsilon(1e-13));
        const std::vector<double> t1 = surface_trace(f, g, SurfaceRecon::FirstOrder);
        for (int i = 0; i < g.n_theta; ++i) CHECK(t1[i] == f(i, 0));
    }
}
