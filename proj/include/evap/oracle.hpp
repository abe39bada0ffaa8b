#pragma once

#include "evap/field.hpp"
#include "evap/geometry.hpp"
#include "evap/physics.hpp"

namespace evap {

/// Quasi-stationary d2-law reference: uniform droplet temperature from the
/// implicit wet-bulb balance, linear decay of the squared radius.
struct D2Law {
    double T_d = 0.0;      // wet-bulb temperature, C
    double slope = 0.0;    // dR^2/dt, m^2/s, <= 0
    double lifetime(double R0) const;
};

/// Solves (rho_sat(T_d) - rho_inf)/(T_inf - T_d) = k_g/(D_v*Lambda) by
/// bisection on [T_star, T_inf]; RH_inf = 1 degenerates to T_d = T_inf with
/// zero slope.
D2Law solve_wet_bulb(const MaterialParams& params, const DryingState& drying);

/// max(R0^2 + slope*t, 0).
double d2_radius_sq(double t, double R0, const D2Law& law);

/// u(theta, r) = a + b/r at cell centers; harmonic in 3-d, the manufactured
/// solution of the diffusion-operator verification.
Field harmonic_profile(const AxiGrid& grid, double a, double b);

/// Droplet radius of a given liquid volume in microliters.
double radius_from_volume_ul(double volume_ul);

}  // namespace evap
