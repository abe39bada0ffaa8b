#include "evap/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evap {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kCelsiusToKelvin = 273.15;
constexpr double kTetensPole = -237.3;
}

void MaterialParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::invalid_argument(std::string("MaterialParams: ") + name +
                                        " must be strictly positive");
    };
    positive(rho_d, "rho_d");
    positive(rho_g, "rho_g");
    positive(cp_g, "cp_g");
    positive(k_g, "k_g");
    positive(D_v, "D_v");
    positive(Lambda, "Lambda");
    positive(M_w, "M_w");
    positive(R_gas, "R_gas");
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("MaterialParams: beta must lie in (0, 1]");
    if (nondimensional) {
        for (double v : {rho_d, rho_g, cp_g, k_g, D_v, Lambda, M_w, R_gas})
            if (v != 1.0)
                throw std::invalid_argument(
                    "MaterialParams: nondimensional mode requires unit coefficients");
        if (!surrogate)
            throw std::invalid_argument(
                "MaterialParams: nondimensional mode requires a saturation surrogate");
        if (surrogate->rho_hi < surrogate->rho_lo || surrogate->T_hi < surrogate->T_lo)
            throw std::invalid_argument("MaterialParams: surrogate bounds out of order");
    }
}

MaterialParams MaterialParams::water_air() { return MaterialParams{}; }

MaterialParams MaterialParams::unit(const RampSurrogate& s) {
    MaterialParams p;
    p.rho_d = p.rho_g = p.cp_g = p.k_g = p.D_v = p.Lambda = p.M_w = p.R_gas = 1.0;
    p.beta = 1.0;
    p.C_hk = 1.0;
    p.nondimensional = true;
    p.surrogate = s;
    return p;
}

double p_sat(double T_C) {
    if (!(T_C > kTetensPole))
        throw std::domain_error("p_sat: temperature at or below the Tetens pole (-237.3 C)");
    return 610.78 * std::exp(17.27 * T_C / (T_C + 237.3));
}

double rho_sat(double T_C, const MaterialParams& p) {
    if (p.nondimensional) {
        const RampSurrogate& s = *p.surrogate;
        const double v = s.rho_lo + s.slope() * (T_C - s.T_lo);
        return std::clamp(v, s.rho_lo, s.rho_hi);
    }
    const double T_abs = T_C + kCelsiusToKelvin;
    if (!(T_abs > 0.0))
        throw std::domain_error("rho_sat: absolute temperature must be positive");
    return p_sat(T_C) * p.M_w / (p.R_gas * T_abs);
}

double drho_sat_dT(double T_C, const MaterialParams& p) {
    if (p.nondimensional) {
        // slope on the closed ramp interval, zero strictly outside; keeps the
        // derivative usable at the box corners the iterates start from
        const RampSurrogate& s = *p.surrogate;
        return (T_C < s.T_lo || T_C > s.T_hi) ? 0.0 : s.slope();
    }
    // product/chain rule on rho_sat = p_sat * M_w / (R_gas * T_abs)
    const double T_abs = T_C + kCelsiusToKelvin;
    if (!(T_abs > 0.0))
        throw std::domain_error("drho_sat_dT: absolute temperature must be positive");
    const double d = T_C + 237.3;
    return rho_sat(T_C, p) * (17.27 * 237.3 / (d * d) - 1.0 / T_abs);
}

double hk_coefficient(const MaterialParams& p, double T_ref_C) {
    if (p.nondimensional) return 1.0;
    const double T_abs = T_ref_C + kCelsiusToKelvin;
    if (!(T_abs > 0.0))
        throw std::domain_error("hk_coefficient: absolute temperature must be positive");
    return p.beta * std::sqrt(p.R_gas * T_abs / (2.0 * kPi * p.M_w));
}

double evap_rate(double T_s, double rho_s, const MaterialParams& p) {
    return p.C_hk * (rho_sat(T_s, p) - rho_s);
}

namespace {
// Bisection run to floating-point exhaustion; f must change sign on [a, b].
template <typename F>
double bisect(F f, double a, double b) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0))
        throw std::runtime_error("bisect: no sign change on bracket");
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}
}  // namespace

double solve_T_star(const MaterialParams& p, double T_inf_C, double rho_inf) {
    const double rho_hi = rho_sat(T_inf_C, p);
    if (!(rho_inf > 0.0) || rho_inf > rho_hi)
        throw std::invalid_argument("solve_T_star: rho_inf must lie in (0, rho_sat(T_inf)]");
    if (rho_inf == rho_hi) return T_inf_C;
    const double T_lo = p.nondimensional ? p.surrogate->T_lo : -100.0;
    if (rho_sat(T_lo, p) > rho_inf)
        throw std::runtime_error("solve_T_star: rho_inf below rho_sat at the bracket floor");
    return bisect([&](double T) { return rho_sat(T, p) - rho_inf; }, T_lo, T_inf_C);
}

DryingState DryingState::from_conditions(const MaterialParams& p, double T_inf_C,
                                         double RH_inf) {
    if (!(RH_inf > 0.0) || RH_inf > 1.0)
        throw std::invalid_argument("DryingState: RH_inf must lie in (0, 1]");
    if (!(p.C_hk > 0.0))
        throw std::invalid_argument("DryingState: C_hk must be frozen first");
    DryingState d;
    d.T_inf = T_inf_C;
    d.RH_inf = RH_inf;
    d.rho_star = rho_sat(T_inf_C, p);
    d.rho_inf = RH_inf * d.rho_star;
    d.T_star = solve_T_star(p, T_inf_C, d.rho_inf);
    // sampled maximum of the saturation-curve slope, 1% safety factor
    double dmax = 0.0;
    const int n = 1000;
    for (int k = 0; k <= n; ++k) {
        const double T = d.T_star + (d.T_inf - d.T_star) * k / n;
        dmax = std::max(dmax, drho_sat_dT(T, p));
    }
    d.L = 1.01 * dmax;
    d.J_inf = p.C_hk * (d.rho_star - d.rho_inf);
    return d;
}

DryingState DryingState::nondimensional(const MaterialParams& p) {
    if (!p.nondimensional || !p.surrogate)
        throw std::invalid_argument("DryingState: params are not nondimensional");
    const RampSurrogate& s = *p.surrogate;
    DryingState d;
    d.T_star = s.T_lo;
    d.T_inf = s.T_hi;
    d.rho_inf = s.rho_lo;
    d.rho_star = s.rho_hi;
    d.RH_inf = d.rho_star > 0.0 ? d.rho_inf / d.rho_star : 1.0;
    d.L = s.slope();
    d.J_inf = p.C_hk * (d.rho_star - d.rho_inf);
    return d;
}

void DryingState::validate(const MaterialParams& p) const {
    if (rho_inf > rho_star)
        throw std::invalid_argument("DryingState: rho_inf exceeds rho_star (condensation)");
    if (T_star > T_inf)
        throw std::invalid_argument("DryingState: T_star exceeds T_inf");
    const double resid = std::abs(rho_sat(T_star, p) - rho_inf);
    if (rho_inf > 0.0 && resid > 1e-12 * rho_inf)
        throw std::invalid_argument("DryingState: rho_sat(T_star) does not match rho_inf");
    const int n = 1000;
    for (int k = 0; k <= n; ++k) {
        const double T = T_star + (T_inf - T_star) * k / n;
        if (drho_sat_dT(T, p) > L)
            throw std::invalid_argument("DryingState: L is not a Lipschitz bound");
    }
}

}  // namespace evap
