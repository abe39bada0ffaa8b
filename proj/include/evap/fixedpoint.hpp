#pragma once

#include <vector>

#include "evap/radius_path.hpp"
#include "evap/timeloop.hpp"

namespace evap {

/// Everything a decoupled solve needs; the Volterra operator maps radius
/// paths through this context.
struct VolterraContext {
    AxiGrid grid;
    MaterialParams params;
    DryingState drying;
    VelocityModel model;
    SolverConfig solver;
    double R0 = 0.0;

    double rate_bound() const { return drying.J_inf / params.rho_d; }
};

/// Solution operator S(R): decoupled field trajectories for a prescribed
/// admissible path. Throws ConfigError on inadmissible input.
Trajectory decoupled_solve(const VolterraContext& ctx, const RadiusPath& path,
                           bool store_fields = false);

/// T(R)(t) = R0 - (1/(4 pi rho_d)) * int_0^t int_Gamma J(S(R)) dsigma dtau,
/// cumulative trapezoidal in time. Output admissibility is asserted.
RadiusPath volterra_apply(const VolterraContext& ctx, const RadiusPath& path);

struct ContractionReport {
    std::vector<double> q;            // q_m = ||dR_{m+1}||_H1 / ||dR_m||_H1
    std::vector<double> residual_h1;  // ||T(R_m) - R_m||_H1
    int iterations = 0;
    bool converged = false;
    RadiusPath fixed_point;
    double sup_diff_vs_coupled = 0.0;  // filled by compare_with_coupled
};

/// Iterates R_{m+1} = T(R_m) from the constant path R0 on [0, t_star].
/// Requires the smallness condition t_star < R0*rho_d/(2*J_inf) so paths
/// stay bounded away from zero; throws ConfigError otherwise.
ContractionReport picard_to_fixed_point(const VolterraContext& ctx, double t_star,
                                        int m_max, double tol);

/// Sup-norm distance between the converged fixed point and the coupled
/// timeloop radius on the same grid.
double compare_with_coupled(const VolterraContext& ctx, const RadiusPath& fixed_point);

void write_contraction_csv(const ContractionReport& rep, std::ostream& os);

}  // namespace evap
