#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "evap/physics.hpp"

using namespace evap;

namespace {
MaterialParams frozen_params() {
    MaterialParams p = MaterialParams::water_air();
    p.C_hk = hk_coefficient(p, 60.0);
    return p;
}
}  // namespace

TEST_CASE("Tetens saturation pressure") {
    CHECK(p_sat(0.0) == doctest::Approx(610.78).epsilon(1e-14));
    // frozen from direct evaluation of the Tetens formula
    CHECK(p_sat(20.0) == doctest::Approx(2338.2047063802643).epsilon(1e-12));
    CHECK(p_sat(60.0) == doctest::Approx(19932.4661012818).epsilon(1e-12));
    CHECK_THROWS_AS(p_sat(-237.3), std::domain_error);
    CHECK_THROWS_AS(p_sat(-240.0), std::domain_error);
}

TEST_CASE("saturation curve strictly increasing on [0, 100] C") {
    const MaterialParams p = MaterialParams::water_air();
    double prev_p = p_sat(0.0), prev_r = rho_sat(0.0, p);
    for (int k = 1; k <= 1000; ++k) {
        const double T = 100.0 * k / 1000.0;
        CHECK(p_sat(T) > prev_p);
        CHECK(rho_sat(T, p) > prev_r);
        prev_p = p_sat(T);
        prev_r = rho_sat(T, p);
    }
}

TEST_CASE("saturated vapor density") {
    const MaterialParams p = MaterialParams::water_air();
    CHECK(rho_sat(20.0, p) == doctest::Approx(0.017281948762894836).epsilon(1e-12));
    CHECK(rho_sat(60.0, p) == doctest::Approx(0.1296347092510326).epsilon(1e-12));
}

TEST_CASE("nondimensional saturation surrogate") {
    SUBCASE("zero slope degenerates to a constant") {
        MaterialParams p = MaterialParams::unit({0.0, 1.0, 0.3, 0.3});
        for (double T : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
            CHECK(rho_sat(T, p) == 0.3);
            CHECK(drho_sat_dT(T, p) == 0.0);
        }
    }
    SUBCASE("ramp clamps outside the box and has slope L inside") {
        MaterialParams p = MaterialParams::unit({0.0, 1.0, 0.0, 1.0});
        CHECK(rho_sat(-0.5, p) == 0.0);
        CHECK(rho_sat(0.25, p) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(rho_sat(1.5, p) == 1.0);
        CHECK(drho_sat_dT(0.5, p) == 1.0);
        CHECK(drho_sat_dT(2.0, p) == 0.0);
    }
}

TEST_CASE("closed-form derivative matches central differences") {
    const MaterialParams p = MaterialParams::water_air();
    const double h = 1e-4;
    for (double T : {10.0, 40.0, 60.0}) {
        const double fd = (rho_sat(T + h, p) - rho_sat(T - h, p)) / (2.0 * h);
        CHECK(drho_sat_dT(T, p) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("Hertz-Knudsen prefactor") {
    MaterialParams p = MaterialParams::water_air();
    // frozen: sqrt(R_gas * 333.15 / (2 pi * 0.018015))
    CHECK(hk_coefficient(p, 60.0) == doctest::Approx(156.43356185534327).epsilon(1e-12));
    const double full = hk_coefficient(p, 60.0);
    p.beta = 0.5;
    CHECK(hk_coefficient(p, 60.0) == 0.5 * full);
    p.beta = 1.0;
    // sqrt scaling in the absolute reference temperature
    const double T4 = (60.0 + 273.15) * 4.0 - 273.15;
    CHECK(hk_coefficient(p, T4) == doctest::Approx(2.0 * full).epsilon(1e-13));
    CHECK(hk_coefficient(MaterialParams::unit({0, 1, 0, 1}), 0.5) == 1.0);
}

TEST_CASE("evaporation rate at the box corners") {
    const MaterialParams p = frozen_params();
    const DryingState d = DryingState::from_conditions(p, 60.0, 0.1);
    CHECK(evap_rate(d.T_star, d.rho_inf, p) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(std::abs(evap_rate(d.T_star, d.rho_inf, p)) <= 1e-12 * d.J_inf);
    CHECK(evap_rate(d.T_inf, d.rho_inf, p) == doctest::Approx(d.J_inf).epsilon(1e-14));
    CHECK(evap_rate(d.T_inf, d.rho_star, p) == 0.0);
}

TEST_CASE("evap_rate bounded on the admissible region") {
    const MaterialParams p = frozen_params();
    const DryingState d = DryingState::from_conditions(p, 60.0, 0.1);
    for (int a = 0; a <= 40; ++a) {
        for (int b = 0; b <= 40; ++b) {
            const double T = d.T_star + (d.T_inf - d.T_star) * a / 40.0;
            const double rho = d.rho_inf + (d.rho_star - d.rho_inf) * b / 40.0;
            CHECK(std::abs(evap_rate(T, rho, p)) <= d.J_inf * (1 + 1e-12));
            if (rho <= rho_sat(T, p)) {
                CHECK(evap_rate(T, rho, p) >= 0.0);
                CHECK(evap_rate(T, rho, p) <= d.J_inf * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("T_star solve") {
    const MaterialParams p = frozen_params();
    SUBCASE("saturated air pins T_star at T_inf") {
        CHECK(solve_T_star(p, 60.0, rho_sat(60.0, p)) == 60.0);
    }
    SUBCASE("frozen bisection value at RH = 0.1") {
        const double rho_inf = 0.1 * rho_sat(60.0, p);
        const double T_star = solve_T_star(p, 60.0, rho_inf);
        CHECK(T_star == doctest::Approx(15.179373814131637).epsilon(1e-10));
        // defining equation holds far beyond the 1e-12 contract
        CHECK(std::abs(rho_sat(T_star, p) - rho_inf) <= 1e-12 * rho_inf);
    }
    SUBCASE("monotone in relative humidity") {
        double prev = -1e9;
        for (double rh : {0.1, 0.3, 0.5, 0.9}) {
            const double t = solve_T_star(p, 60.0, rh * rho_sat(60.0, p));
            CHECK(t > prev);
            prev = t;
        }
    }
    SUBCASE("bracket failure reported") {
        CHECK_THROWS(solve_T_star(p, 60.0, 1e-12));
    }
}

TEST_CASE("drying state invariants") {
    const MaterialParams p = frozen_params();
    const DryingState d = DryingState::from_conditions(p, 60.0, 0.1);
    CHECK_NOTHROW(d.validate(p));
    CHECK(d.rho_inf <= d.rho_star);
    CHECK(d.T_star <= d.T_inf);
    CHECK(d.J_inf == doctest::Approx(p.C_hk * 0.9 * d.rho_star).epsilon(1e-14));
    // L dominates the saturation slope on [T_star, T_inf]
    for (int k = 0; k <= 1000; ++k) {
        const double T = d.T_star + (d.T_inf - d.T_star) * k / 1000.0;
        CHECK(drho_sat_dT(T, p) >= 0.0);
        CHECK(drho_sat_dT(T, p) <= d.L);
    }
    CHECK_THROWS_AS(DryingState::from_conditions(p, 60.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(DryingState::from_conditions(p, 60.0, 0.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    MaterialParams p = MaterialParams::water_air();
    p.C_hk = 1.0;
    CHECK_NOTHROW(p.validate());
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.beta = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = MaterialParams::water_air();
    p.D_v = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    MaterialParams u = MaterialParams::unit({0, 1, 0, 1});
    CHECK_NOTHROW(u.validate());
    u.k_g = 2.0;
    CHECK_THROWS_AS(u.validate(), std::invalid_argument);
}

TEST_CASE("nondimensional drying state reads the surrogate") {
    const MaterialParams p = MaterialParams::unit({0.0, 1.0, 0.25, 1.0});
    const DryingState d = DryingState::nondimensional(p);
    CHECK(d.T_star == 0.0);
    CHECK(d.T_inf == 1.0);
    CHECK(d.rho_inf == 0.25);
    CHECK(d.rho_star == 1.0);
    CHECK(d.L == 0.75);
    CHECK(d.J_inf == 0.75);
    CHECK_NOTHROW(d.validate(p));
}
