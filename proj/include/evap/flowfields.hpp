#pragma once

#include <functional>
#include <string>
#include <variant>

#include "evap/geometry.hpp"

namespace evap {

struct Stagnant {};

/// Creeping flow past a sphere; independent of the droplet radius.
struct Stokes {
    double v_inf = 0.0;  // far-field speed, m/s
};

/// Outer acoustic streaming around a levitated droplet.
struct Acoustic {
    double amplitude = 0.0;  // sound pressure amplitude, Pa
    double omega = 0.0;      // angular frequency, rad/s
    double c0 = 343.0;       // speed of sound, m/s
};

using VelocityModel = std::variant<Stagnant, Stokes, Acoustic>;

struct FlowSample {
    double v_theta = 0.0;
    double v_r = 0.0;
};

/// Velocity in physical units sampled at rescaled coordinates (theta, r).
/// The radial component vanishes identically at r = 1 for every variant.
FlowSample flow_eval(const VelocityModel& model, double theta, double r,
                     double R, double rho_g);

/// Acoustic streaming magnitude 45*A^2/(32*omega*R*rho_g^2*c0^2).
double acoustic_prefactor(const Acoustic& a, double R, double rho_g);

/// Characteristic speed of the model (V_inf, K, or 0 for stagnant air).
double flow_speed_scale(const VelocityModel& model, double R, double rho_g);

double spl_to_amplitude(double spl_db);
double amplitude_to_spl(double amplitude_pa);  // throws on A <= 0

std::string flow_name(const VelocityModel& model);

/// Max over cell centers of |div v| / speed scale, with the axisymmetric
/// spherical divergence evaluated by central differences (h = 1e-5).
double check_divergence(const VelocityModel& model, const AxiGrid& grid,
                        double R, double rho_g);

/// Same check for an arbitrary field; lets tests feed deliberately
/// non-solenoidal fields to prove the validator catches them.
double check_divergence(const std::function<FlowSample(double, double)>& field,
                        const AxiGrid& grid, double speed_scale);

/// sup over cell centers of |v(x; R1) - v(x; R2)|, the quantity whose ratio
/// to |R1 - R2| assumption (A6) bounds.
double lipschitz_in_R(const VelocityModel& model, double R1, double R2,
                      const AxiGrid& grid, double rho_g);

}  // namespace evap
