#include "evap/fixedpoint.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "evap/errors.hpp"

namespace evap {

namespace {
Simulator make_sim(const VolterraContext& ctx) {
    return Simulator(ctx.grid, ctx.params, ctx.drying, ctx.model, ctx.solver, ctx.R0);
}
}  // namespace

Trajectory decoupled_solve(const VolterraContext& ctx, const RadiusPath& path,
                           bool store_fields) {
    if (!is_admissible(path, ctx.R0, ctx.rate_bound()))
        throw ConfigError("decoupled_solve: path is not in Sigma (initial value or rate bound)");
    if (path.min_value() <= 0.0)
        throw ConfigError("decoupled_solve: path not bounded away from zero");
    Simulator sim = make_sim(ctx);
    return sim.run_prescribed(path, store_fields);
}

RadiusPath volterra_apply(const VolterraContext& ctx, const RadiusPath& path) {
    const Trajectory traj = decoupled_solve(ctx, path, false);
    const double dt = path.dt();
    RadiusPath out;
    out.times = path.times;
    out.values.resize(path.values.size());
    out.values[0] = ctx.R0;
    // cumulative trapezoid of the surface-averaged evaporation rate
    double acc = 0.0;
    for (int n = 1; n <= path.n_steps(); ++n) {
        acc += 0.5 * dt * (traj.steps[n - 1].mon.J_avg + traj.steps[n].mon.J_avg);
        out.values[n] = ctx.R0 - acc / ctx.params.rho_d;
    }
    if (!is_admissible(out, ctx.R0, ctx.rate_bound(), 1e-9))
        throw InvariantViolation("volterra_apply: output path left Sigma");
    return out;
}

ContractionReport picard_to_fixed_point(const VolterraContext& ctx, double t_star,
                                        int m_max, double tol) {
    const double smallness = ctx.R0 * ctx.params.rho_d / (2.0 * ctx.drying.J_inf);
    if (!(t_star < smallness)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "picard_to_fixed_point: t_star=%.6g violates t_star < R0*rho_d/(2*J_inf)"
                      " = %.6g",
                      t_star, smallness);
        throw ConfigError(buf);
    }
    const double dt = ctx.solver.dt;
    const int n_steps = static_cast<int>(std::llround(t_star / dt));
    if (n_steps < 1) throw ConfigError("picard_to_fixed_point: t_star shorter than one step");

    ContractionReport rep;
    RadiusPath current = RadiusPath::constant(ctx.R0, dt, n_steps);
    double prev_diff = -1.0;
    for (int m = 0; m < m_max; ++m) {
        RadiusPath next = volterra_apply(ctx, current);
        const double diff = h1_distance(next, current);
        rep.residual_h1.push_back(diff);
        if (prev_diff > 0.0) rep.q.push_back(diff / prev_diff);
        prev_diff = diff;
        current = next;
        rep.iterations = m + 1;
        if (diff <= tol) {
            rep.converged = true;
            break;
        }
    }
    rep.fixed_point = current;
    return rep;
}

double compare_with_coupled(const VolterraContext& ctx, const RadiusPath& fixed_point) {
    SolverConfig cfg = ctx.solver;
    cfg.t_end = fixed_point.times.back();
    Simulator sim(ctx.grid, ctx.params, ctx.drying, ctx.model, cfg, ctx.R0);
    const Trajectory coupled = sim.run(false);
    double sup = 0.0;
    const size_t n = std::min(coupled.steps.size(), fixed_point.values.size());
    for (size_t k = 0; k < n; ++k)
        sup = std::max(sup, std::abs(coupled.steps[k].R - fixed_point.values[k]));
    return sup;
}

void write_contraction_csv(const ContractionReport& rep, std::ostream& os) {
    os << "m,residual_h1,q\n";
    char buf[96];
    for (size_t m = 0; m < rep.residual_h1.size(); ++m) {
        if (m == 0)
            std::snprintf(buf, sizeof buf, "%zu,%.12g,\n", m + 1, rep.residual_h1[m]);
        else
            std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", m + 1, rep.residual_h1[m],
                          rep.q[m - 1]);
        os << buf;
    }
}

}  // namespace evap
