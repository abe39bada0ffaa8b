#include "evap/flowfields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evap {

namespace {
constexpr double kFdStep = 1e-5;  // central-difference step for the divergence check
}

double acoustic_prefactor(const Acoustic& a, double R, double rho_g) {
    if (!(R > 0.0))
        throw std::invalid_argument("acoustic_prefactor: droplet radius must be positive");
    return 45.0 * a.amplitude * a.amplitude /
           (32.0 * a.omega * R * rho_g * rho_g * a.c0 * a.c0);
}

FlowSample flow_eval(const VelocityModel& model, double theta, double r, double R,
                     double rho_g) {
    if (!(r >= 1.0)) throw std::invalid_argument("flow_eval: r must be >= 1");
    if (std::holds_alternative<Stagnant>(model)) return {0.0, 0.0};
    if (const Stokes* s = std::get_if<Stokes>(&model)) {
        const double r3 = r * r * r;
        // v_r carries the factor (1 + 1/(2r^3) - 3/(2r)): exactly zero at r = 1
        return {-s->v_inf * std::sin(theta) * (1.0 - 1.0 / (4.0 * r3) - 3.0 / (4.0 * r)),
                s->v_inf * std::cos(theta) * (1.0 + 1.0 / (2.0 * r3) - 3.0 / (2.0 * r))};
    }
    const Acoustic& a = std::get<Acoustic>(model);
    const double K = acoustic_prefactor(a, R, rho_g);
    const double r2 = r * r;
    const double r4 = r2 * r2;
    const double c = std::cos(theta);
    return {-K * std::sin(2.0 * theta) / r4,
            K * (1.0 / r2 - 1.0 / r4) * (3.0 * c * c - 1.0)};
}

double flow_speed_scale(const VelocityModel& model, double R, double rho_g) {
    if (std::holds_alternative<Stagnant>(model)) return 0.0;
    if (const Stokes* s = std::get_if<Stokes>(&model)) return s->v_inf;
    return acoustic_prefactor(std::get<Acoustic>(model), R, rho_g);
}

double spl_to_amplitude(double spl_db) {
    return std::pow(10.0, (spl_db - 94.0) / 20.0);
}

double amplitude_to_spl(double amplitude_pa) {
    if (!(amplitude_pa > 0.0))
        throw std::invalid_argument("amplitude_to_spl: amplitude must be positive");
    return 20.0 * std::log10(amplitude_pa) + 94.0;
}

std::string flow_name(const VelocityModel& model) {
    if (std::holds_alternative<Stagnant>(model)) return "stagnant";
    if (std::holds_alternative<Stokes>(model)) return "stokes";
    return "acoustic";
}

double check_divergence(const std::function<FlowSample(double, double)>& field,
                        const AxiGrid& grid, double speed_scale) {
    const double h = kFdStep;
    double worst = 0.0;
    for (int i = 0; i < grid.n_theta; ++i) {
        const double th = grid.theta_c[i];
        for (int j = 0; j < grid.n_r; ++j) {
            const double r = grid.r_c[j];
            const FlowSample c = field(th, r);
            const FlowSample rp = field(th, r + h);
            const FlowSample rm = field(th, r - h);
            const FlowSample tp = field(th + h, r);
            const FlowSample tm = field(th - h, r);
            // (1/r^2) d_r(r^2 v_r) + (1/(r sin th)) d_th(sin th v_th)
            const double dr = ((r + h) * (r + h) * rp.v_r - (r - h) * (r - h) * rm.v_r) /
                              (2.0 * h * r * r);
            const double dth = (std::sin(th + h) * tp.v_theta - std::sin(th - h) * tm.v_theta) /
                               (2.0 * h * r * std::sin(th));
            const double div = dr + dth;
            const double scale = std::max({speed_scale, std::abs(c.v_theta) + std::abs(c.v_r),
                                           1e-300});
            worst = std::max(worst, std::abs(div) / scale);
        }
    }
    return worst;
}

double check_divergence(const VelocityModel& model, const AxiGrid& grid, double R,
                        double rho_g) {
    if (std::holds_alternative<Stagnant>(model)) return 0.0;
    return check_divergence(
        [&](double th, double r) { return flow_eval(model, th, r, R, rho_g); }, grid,
        flow_speed_scale(model, R, rho_g));
}

double lipschitz_in_R(const VelocityModel& model, double R1, double R2,
                      const AxiGrid& grid, double rho_g) {
    if (!(R1 > 0.0) || !(R2 > 0.0))
        throw std::invalid_argument("lipschitz_in_R: radii must be positive");
    double sup = 0.0;
    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 0; j < grid.n_r; ++j) {
            const FlowSample a = flow_eval(model, grid.theta_c[i], grid.r_c[j], R1, rho_g);
            const FlowSample b = flow_eval(model, grid.theta_c[i], grid.r_c[j], R2, rho_g);
            sup = std::max({sup, std::abs(a.v_theta - b.v_theta), std::abs(a.v_r - b.v_r)});
        }
    }
    return sup;
}

}  // namespace evap
