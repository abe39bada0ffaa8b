#include "evap/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "evap/errors.hpp"

namespace evap {

Eigen::SparseMatrix<double> TransportSystem::matrix() const {
    Eigen::SparseMatrix<double> A(size(), size());
    A.setFromTriplets(entries.begin(), entries.end());
    return A;
}

TransportSystem make_transport_system(const AxiGrid& grid, int n_blocks, double R,
                                      double Rdot, double dt, Scheme scheme) {
    if (!(R > 0.0)) throw SolverError("make_transport_system: R must be positive");
    TransportSystem sys;
    sys.n_cells = grid.n_cells();
    sys.n_blocks = n_blocks;
    sys.R = R;
    sys.Rdot = Rdot;
    sys.dt = dt;
    sys.scheme = scheme;
    sys.rhs = Eigen::VectorXd::Zero(sys.size());
    sys.entries.reserve(static_cast<size_t>(12) * sys.size());
    return sys;
}

namespace {

inline void add(TransportSystem& sys, int row, int col, double v) {
    sys.entries.emplace_back(row, col, v);
}

}  // namespace

void assemble_time_term(TransportSystem& sys, const AxiGrid& grid, const Field& previous,
                        int block) {
    if (!(sys.dt > 0.0)) return;  // steady system
    const int off = block * sys.n_cells;
    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 0; j < grid.n_r; ++j) {
            const int c = grid.cell(i, j);
            const double m = grid.vol[c] / sys.dt;
            add(sys, off + c, off + c, m);
            sys.rhs[off + c] += m * previous(i, j);
        }
    }
}

void assemble_diffusion(TransportSystem& sys, const AxiGrid& grid, double alpha, int block) {
    sys.alpha[block] = alpha;
    if (alpha == 0.0) return;
    const int off = block * sys.n_cells;
    const double coef = alpha / (sys.R * sys.R);
    // radial interior faces
    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 1; j < grid.n_r; ++j) {
            const double g = coef * grid.radial_area(i, j) / (grid.r_c[j] - grid.r_c[j - 1]);
            const int cl = off + grid.cell(i, j - 1);
            const int cr = off + grid.cell(i, j);
            add(sys, cl, cl, g);
            add(sys, cl, cr, -g);
            add(sys, cr, cr, g);
            add(sys, cr, cl, -g);
        }
    }
    // polar interior faces; the axis faces have zero area
    for (int i = 1; i < grid.n_theta; ++i) {
        const double dth = grid.theta_c[i] - grid.theta_c[i - 1];
        for (int j = 0; j < grid.n_r; ++j) {
            const double g = coef * grid.polar_area(i, j) / (grid.r_c[j] * dth);
            const int cl = off + grid.cell(i - 1, j);
            const int cr = off + grid.cell(i, j);
            add(sys, cl, cl, g);
            add(sys, cl, cr, -g);
            add(sys, cr, cr, g);
            add(sys, cr, cl, -g);
        }
    }
}

AdvectiveFluxes advective_fluxes(const AxiGrid& grid, const VelocityModel& model,
                                 double rho_g, double R, double Rdot) {
    AdvectiveFluxes f;
    f.phi_r.assign(static_cast<size_t>(grid.n_theta) * (grid.n_r + 1), 0.0);
    f.phi_theta.assign(static_cast<size_t>(grid.n_theta + 1) * grid.n_r, 0.0);
    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 0; j <= grid.n_r; ++j) {
            const double r = grid.r_faces[j];
            const FlowSample v = flow_eval(model, grid.theta_c[i], r, R, rho_g);
            const double w_r = (v.v_r - Rdot * r) / R;
            f.phi_r[i * (grid.n_r + 1) + j] = grid.radial_area(i, j) * w_r;
        }
    }
    for (int i = 1; i < grid.n_theta; ++i) {  // axis faces carry no flux
        for (int j = 0; j < grid.n_r; ++j) {
            const FlowSample v = flow_eval(model, grid.theta_faces[i], grid.r_c[j], R, rho_g);
            f.phi_theta[i * grid.n_r + j] = grid.polar_area(i, j) * (v.v_theta / R);
        }
    }
    return f;
}

void assemble_advection(TransportSystem& sys, const AxiGrid& grid,
                        const VelocityModel& model, double rho_g, double far_value,
                        SurfaceRecon recon, int block) {
    const int off = block * sys.n_cells;
    const bool upwind = sys.scheme == Scheme::Upwind;
    const AdvectiveFluxes f = advective_fluxes(grid, model, rho_g, sys.R, sys.Rdot);
    const ReconWeights rw = recon_weights(grid, recon);

    // interior face between cl (lower index) and cr, flux phi in +direction;
    // the flux-difference form sum_f phi*(u_f - u_c) vanishes on constants
    auto interior_face = [&](int cl, int cr, double phi) {
        if (phi == 0.0) return;
        if (upwind) {
            if (phi < 0.0) {  // inflow to cl, donor cr
                add(sys, cl, cr, phi);
                add(sys, cl, cl, -phi);
            } else {  // inflow to cr, donor cl
                add(sys, cr, cl, -phi);
                add(sys, cr, cr, phi);
            }
        } else {
            add(sys, cl, cr, 0.5 * phi);
            add(sys, cl, cl, -0.5 * phi);
            add(sys, cr, cl, -0.5 * phi);
            add(sys, cr, cr, 0.5 * phi);
        }
    };

    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 1; j < grid.n_r; ++j)
            interior_face(off + grid.cell(i, j - 1), off + grid.cell(i, j),
                          f.phi_r[i * (grid.n_r + 1) + j]);

        // outer boundary face: inflow carries the far value
        {
            const int c = off + grid.cell(i, grid.n_r - 1);
            const double phi = f.phi_r[i * (grid.n_r + 1) + grid.n_r];
            if (upwind) {
                if (phi < 0.0) {
                    add(sys, c, c, -phi);
                    sys.rhs[c] += -phi * far_value;
                }
            } else if (phi != 0.0) {
                add(sys, c, c, -0.5 * phi);
                sys.rhs[c] += -0.5 * phi * far_value;
            }
        }

        // surface face: outward normal is -r, face value is the trace
        {
            const int c0 = off + grid.cell(i, 0);
            const int c1 = off + grid.cell(i, 1);
            const double phi = -f.phi_r[i * (grid.n_r + 1)];
            const bool include = upwind ? (phi < 0.0) : (phi != 0.0);
            if (include) {
                add(sys, c0, c0, phi * (rw.e0 - 1.0));
                add(sys, c0, c1, phi * rw.e1);
            }
        }
    }
    for (int i = 1; i < grid.n_theta; ++i)
        for (int j = 0; j < grid.n_r; ++j)
            interior_face(off + grid.cell(i - 1, j), off + grid.cell(i, j),
                          f.phi_theta[i * grid.n_r + j]);
}

void apply_dirichlet_far(TransportSystem& sys, const AxiGrid& grid, double alpha,
                         double value, int block) {
    const int off = block * sys.n_cells;
    const double coef = alpha / (sys.R * sys.R);
    const double d = grid.r_faces[grid.n_r] - grid.r_c[grid.n_r - 1];
    for (int i = 0; i < grid.n_theta; ++i) {
        const double g = coef * grid.radial_area(i, grid.n_r) / d;
        const int c = off + grid.cell(i, grid.n_r - 1);
        add(sys, c, c, g);
        sys.rhs[c] += g * value;
    }
}

void apply_dirichlet_surface(TransportSystem& sys, const AxiGrid& grid, double alpha,
                             double value, int block) {
    const int off = block * sys.n_cells;
    const double coef = alpha / (sys.R * sys.R);
    const double d = grid.r_c[0] - 1.0;
    for (int i = 0; i < grid.n_theta; ++i) {
        const double g = coef * grid.radial_area(i, 0) / d;
        const int c = off + grid.cell(i, 0);
        add(sys, c, c, g);
        sys.rhs[c] += g * value;
    }
}

SurfaceValues surface_values(const Field& T, const Field& rho, const AxiGrid& grid,
                             SurfaceRecon recon) {
    return {surface_trace(T, grid, recon), surface_trace(rho, grid, recon)};
}

void apply_robin_newton(TransportSystem& sys, const AxiGrid& grid,
                        const MaterialParams& params, const SurfaceValues& lin,
                        SurfaceRecon recon, FieldKind kind, RobinOptions opts) {
    if (sys.n_blocks != 2)
        throw SolverError("apply_robin_newton: needs the monolithic two-block system");
    sys.robin_lin_T_s = lin.T_s;
    sys.robin_lin_rho_s = lin.rho_s;
    const int n = sys.n_cells;
    const int off_T = 0, off_rho = n;
    const int row_off = kind == FieldKind::Temperature ? off_T : off_rho;
    const ReconWeights rw = recon_weights(grid, recon);

    for (int i = 0; i < grid.n_theta; ++i) {
        const double A_i = grid.radial_area(i, 0);
        // temperature rows: evaporative cooling heat sink; vapor rows: mass source
        const double a = kind == FieldKind::Temperature
                             ? opts.temperature_flux_sign * A_i * params.latent_factor() / sys.R
                             : -A_i / sys.R;
        const double Jm = evap_rate(lin.T_s[i], lin.rho_s[i], params);
        const double Jt = params.C_hk * drho_sat_dT(lin.T_s[i], params);
        const double Jr = -params.C_hk;
        const int r = row_off + grid.cell(i, 0);
        const int c0 = grid.cell(i, 0), c1 = grid.cell(i, 1);
        add(sys, r, off_T + c0, a * Jt * rw.e0);
        add(sys, r, off_T + c1, a * Jt * rw.e1);
        add(sys, r, off_rho + c0, a * Jr * rw.e0);
        add(sys, r, off_rho + c1, a * Jr * rw.e1);
        sys.rhs[r] -= a * (Jm - Jt * lin.T_s[i] - Jr * lin.rho_s[i]);
    }
}

void apply_robin_picard(TransportSystem& sys, const AxiGrid& grid,
                        const MaterialParams& params, double lipschitz_L,
                        const SurfaceValues& prev, SurfaceRecon recon, FieldKind kind) {
    sys.robin_lin_T_s = prev.T_s;
    sys.robin_lin_rho_s = prev.rho_s;
    const ReconWeights rw = recon_weights(grid, recon);
    const int off = 0;  // single-block systems
    for (int i = 0; i < grid.n_theta; ++i) {
        const double A_i = grid.radial_area(i, 0);
        const double Jprev = evap_rate(prev.T_s[i], prev.rho_s[i], params);
        const int c0 = off + grid.cell(i, 0), c1 = off + grid.cell(i, 1);
        if (kind == FieldKind::Temperature) {
            // the row coefficient must dominate dJ/dT = C_hk * rho_sat', so the
            // Lipschitz bound of the saturation curve is scaled by C_hk; with
            // unit coefficients this is exactly the plain L iteration
            const double coef = params.C_hk * lipschitz_L;
            const double lhs = A_i * params.latent_factor() * coef / sys.R;
            add(sys, c0, c0, lhs * rw.e0);
            add(sys, c0, c1, lhs * rw.e1);
            sys.rhs[c0] +=
                A_i * params.latent_factor() / sys.R * (coef * prev.T_s[i] - Jprev);
        } else {
            const double lhs = A_i * params.C_hk / sys.R;
            add(sys, c0, c0, lhs * rw.e0);
            add(sys, c0, c1, lhs * rw.e1);
            sys.rhs[c0] += A_i / sys.R * (params.C_hk * prev.rho_s[i] + Jprev);
        }
    }
}

Eigen::VectorXd SparseDirectSolver::solve(const Eigen::SparseMatrix<double>& A,
                                          const Eigen::VectorXd& b) {
    // re-analyze whenever the sparsity pattern may have changed
    if (!analyzed_ || analyzed_size_ != A.rows() || analyzed_nnz_ != A.nonZeros()) {
        lu_.analyzePattern(A);
        analyzed_ = true;
        analyzed_size_ = static_cast<int>(A.rows());
        analyzed_nnz_ = A.nonZeros();
    }
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success)
        throw SolverError("solve_sparse: factorization failed (singular or ill-conditioned): " +
                          lu_.lastErrorMessage());
    Eigen::VectorXd x = lu_.solve(b);
    const double bnorm = b.norm();
    const double resid = (A * x - b).norm();
    if (!(resid <= 1e-10 * std::max(bnorm, 1e-300))) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "solve_sparse: residual %.3e exceeds 1e-10 * ||b|| (%.3e)",
                      resid, bnorm);
        throw SolverError(buf);
    }
    return x;
}

Eigen::VectorXd SparseDirectSolver::solve(const TransportSystem& sys) {
    Eigen::SparseMatrix<double> A = sys.matrix();
    A.makeCompressed();
    return solve(A, sys.rhs);
}

Eigen::VectorXd solve_sparse(const TransportSystem& sys) {
    SparseDirectSolver s;
    return s.solve(sys);
}

MMatrixReport audit_m_matrix(const Eigen::SparseMatrix<double>& A, double tol_rel) {
    MMatrixReport rep;
    rep.rows_checked = static_cast<int>(A.rows());
    Eigen::SparseMatrix<double, Eigen::RowMajor> R(A);
    for (int r = 0; r < R.rows(); ++r) {
        double diag = 0.0, off_pos = 0.0, row_sum = 0.0, scale = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(R, r); it; ++it) {
            row_sum += it.value();
            scale = std::max(scale, std::abs(it.value()));
            if (it.col() == r)
                diag = it.value();
            else
                off_pos = std::max(off_pos, it.value());
        }
        const double tol = tol_rel * std::max(scale, 1.0);
        bool bad = false;
        if (!(diag > 0.0)) {
            rep.worst_diag = std::min(rep.worst_diag, diag);
            bad = true;
        }
        if (off_pos > tol) {
            rep.worst_offdiag = std::max(rep.worst_offdiag, off_pos);
            bad = true;
        }
        if (row_sum < -tol) {
            rep.worst_dominance = std::min(rep.worst_dominance, row_sum);
            bad = true;
        }
        if (bad) {
            ++rep.bad_rows;
            if (rep.first_failure.empty()) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "row %d: diag=%.3e max_offdiag=%.3e row_sum=%.3e", r, diag,
                              off_pos, row_sum);
                rep.first_failure = buf;
            }
        }
    }
    rep.ok = rep.bad_rows == 0;
    return rep;
}

MMatrixReport audit_m_matrix_blocks(const TransportSystem& sys, double tol_rel) {
    const int n = sys.n_cells;
    MMatrixReport total;
    for (int b = 0; b < sys.n_blocks; ++b) {
        std::vector<Eigen::Triplet<double>> blk;
        for (const auto& t : sys.entries) {
            if (t.row() >= b * n && t.row() < (b + 1) * n && t.col() >= b * n &&
                t.col() < (b + 1) * n)
                blk.emplace_back(t.row() - b * n, t.col() - b * n, t.value());
        }
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(blk.begin(), blk.end());
        const MMatrixReport rep = audit_m_matrix(A, tol_rel);
        total.rows_checked += rep.rows_checked;
        total.bad_rows += rep.bad_rows;
        total.worst_offdiag = std::max(total.worst_offdiag, rep.worst_offdiag);
        total.worst_diag = std::min(total.worst_diag, rep.worst_diag);
        total.worst_dominance = std::min(total.worst_dominance, rep.worst_dominance);
        if (total.first_failure.empty()) total.first_failure = rep.first_failure;
    }
    total.ok = total.bad_rows == 0;
    return total;
}

void dump_matrix(const TransportSystem& sys, std::ostream& os) {
    Eigen::SparseMatrix<double> A = sys.matrix();
    char buf[96];
    for (int k = 0; k < A.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()),
                          static_cast<long>(it.col()), it.value());
            os << buf;
        }
    }
}

}  // namespace evap
