#include "evap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evap {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double D2Law::lifetime(double R0) const {
    if (slope == 0.0) return std::numeric_limits<double>::infinity();
    return R0 * R0 / -slope;
}

D2Law solve_wet_bulb(const MaterialParams& params, const DryingState& drying) {
    D2Law law;
    if (drying.RH_inf >= 1.0) {
        law.T_d = drying.T_inf;
        law.slope = 0.0;
        return law;
    }
    const double c = params.k_g / (params.D_v * params.Lambda);
    // F(T) = (rho_sat(T) - rho_inf) - c*(T_inf - T), strictly increasing:
    // both saturation deficit and the linear term grow with T.
    auto F = [&](double T) {
        return (rho_sat(T, params) - drying.rho_inf) - c * (drying.T_inf - T);
    };
    double a = drying.T_star, b = drying.T_inf;
    double fa = F(a), fb = F(b);
    if (!(fa <= 0.0) || !(fb >= 0.0))
        throw std::runtime_error("solve_wet_bulb: endpoints do not bracket the root");
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = F(m);
        if (fm == 0.0) {
            a = b = m;
            break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    law.T_d = 0.5 * (a + b);
    law.slope = -2.0 * params.k_g * (drying.T_inf - law.T_d) / (params.rho_d * params.Lambda);
    return law;
}

double d2_radius_sq(double t, double R0, const D2Law& law) {
    if (t < 0.0) throw std::invalid_argument("d2_radius_sq: t must be nonnegative");
    return std::max(R0 * R0 + law.slope * t, 0.0);
}

Field harmonic_profile(const AxiGrid& grid, double a, double b) {
    Field f = Field::constant(grid, FieldKind::Temperature, a);
    for (int i = 0; i < grid.n_theta; ++i)
        for (int j = 0; j < grid.n_r; ++j) f(i, j) = a + b / grid.r_c[j];
    return f;
}

double radius_from_volume_ul(double volume_ul) {
    if (!(volume_ul > 0.0))
        throw std::invalid_argument("radius_from_volume_ul: volume must be positive");
    return std::cbrt(3.0 * volume_ul * 1e-9 / (4.0 * kPi));
}

}  // namespace evap
