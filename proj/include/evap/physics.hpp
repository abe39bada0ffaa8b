#pragma once

#include <optional>

namespace evap {

/// Clamped affine stand-in for the saturation curve used in nondimensional
/// runs: s(T) = clamp(rho_lo + slope*(T - T_lo), rho_lo, rho_hi). Monotone
/// with s' in [0, slope], so it satisfies the same structural requirements
/// as the Tetens-based curve.
struct RampSurrogate {
    double T_lo = 0.0;
    double T_hi = 1.0;
    double rho_lo = 0.0;
    double rho_hi = 1.0;
    double slope() const { return T_hi > T_lo ? (rho_hi - rho_lo) / (T_hi - T_lo) : 0.0; }
};

/// All thermophysical coefficients. Dimensional defaults are standard
/// air/water data near 60 C; in nondimensional mode every coefficient is 1
/// and the saturation curve is the ramp surrogate.
struct MaterialParams {
    double rho_d = 998.0;          // liquid density, kg/m^3
    double rho_g = 1.060;          // gas density, kg/m^3
    double cp_g = 1007.0;          // gas specific heat, J/(kg K)
    double k_g = 0.0285;           // gas thermal conductivity, W/(m K)
    double D_v = 3.0e-5;           // vapor diffusivity, m^2/s
    double Lambda = 2.358e6;       // latent heat, J/kg
    double M_w = 0.018015;         // molar mass, kg/mol
    double R_gas = 8.314462618;    // universal gas constant, J/(mol K)
    double beta = 1.0;             // evaporation coefficient in (0,1]
    double C_hk = 0.0;             // frozen Hertz-Knudsen prefactor, m/s
    bool nondimensional = false;
    std::optional<RampSurrogate> surrogate;  // required when nondimensional

    double thermal_diffusivity() const { return k_g / (rho_g * cp_g); }
    /// Latent-heat factor of the temperature boundary flux, Lambda/(rho_g*cp_g).
    double latent_factor() const { return Lambda / (rho_g * cp_g); }

    void validate() const;  // throws std::invalid_argument

    static MaterialParams water_air();
    static MaterialParams unit(const RampSurrogate& s);
};

/// Tetens saturation vapor pressure, Pa; T in degree C, pole at -237.3 C.
double p_sat(double T_C);

/// Saturated vapor mass density p_sat*M_w/(R_gas*T_abs); the ramp surrogate
/// in nondimensional mode.
double rho_sat(double T_C, const MaterialParams& p);

/// Closed-form derivative of rho_sat with respect to temperature.
double drho_sat_dT(double T_C, const MaterialParams& p);

/// Hertz-Knudsen prefactor beta*sqrt(R_gas*T_abs/(2*pi*M_w)) frozen at T_ref.
double hk_coefficient(const MaterialParams& p, double T_ref_C);

/// Evaporation mass flux C_hk*(rho_sat(T_s) - rho_s). May be negative for
/// out-of-band inputs; the solver invariants keep it in [0, J_inf] along
/// trajectories.
double evap_rate(double T_s, double rho_s, const MaterialParams& p);

/// Temperature with rho_sat(T_star) = rho_inf, by bisection on
/// [-100 C, T_inf] run to floating-point exhaustion. Throws on bracket
/// failure.
double solve_T_star(const MaterialParams& p, double T_inf_C, double rho_inf);

/// Far-field drying conditions and the derived bounds the analysis runs on.
struct DryingState {
    double T_inf = 0.0;    // C
    double RH_inf = 1.0;
    double rho_inf = 0.0;  // kg/m^3
    double rho_star = 0.0; // rho_sat(T_inf)
    double T_star = 0.0;   // rho_sat(T_star) = rho_inf
    double L = 0.0;        // Lipschitz bound of drho_sat/dT on [T_star, T_inf]
    double J_inf = 0.0;    // C_hk*(rho_star - rho_inf), maximal evaporation rate

    /// Builds the state from (T_inf, RH_inf); params.C_hk must be frozen
    /// already. Rejects RH_inf outside (0, 1].
    static DryingState from_conditions(const MaterialParams& p, double T_inf_C, double RH_inf);
    /// Reads the bounds straight off the ramp surrogate.
    static DryingState nondimensional(const MaterialParams& p);

    void validate(const MaterialParams& p) const;
};

}  // namespace evap
