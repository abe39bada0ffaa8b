#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "evap/field.hpp"
#include "evap/flowfields.hpp"
#include "evap/geometry.hpp"
#include "evap/physics.hpp"

namespace evap {

enum class Scheme { Upwind, Central };

/// Sparse linear system for the implicit step, one row per cell. A single
/// block holds one variable (the Picard systems); two blocks hold the
/// monolithic [T; rho] Newton system with the temperature unknowns first.
struct TransportSystem {
    int n_cells = 0;
    int n_blocks = 1;
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::VectorXd rhs;

    // assembly metadata
    double R = 1.0;
    double Rdot = 0.0;
    double dt = 0.0;  // <= 0 means steady (no time term)
    Scheme scheme = Scheme::Upwind;
    double alpha[2] = {0.0, 0.0};
    std::vector<double> robin_lin_T_s;    // boundary-flux linearization point,
    std::vector<double> robin_lin_rho_s;  // recorded by the Robin routines

    int size() const { return n_cells * n_blocks; }
    Eigen::SparseMatrix<double> matrix() const;
};

TransportSystem make_transport_system(const AxiGrid& grid, int n_blocks, double R,
                                      double Rdot, double dt, Scheme scheme);

/// vol/dt * (u - u_old); skipped entirely for steady systems (dt <= 0).
void assemble_time_term(TransportSystem& sys, const AxiGrid& grid,
                        const Field& previous, int block);

/// Two-point flux discretization of (alpha/R^2) * Laplace. Interior faces
/// only; the boundary closures are applied by the Robin/Dirichlet routines.
void assemble_diffusion(TransportSystem& sys, const AxiGrid& grid, double alpha, int block);

/// Advection by w = (v - Rdot*x)/R in flux-difference form
/// sum_f A_f (w.n) (u_f - u_c), exactly zero on constants for any w.
/// Upwind takes donor-cell face values (M-matrix preserving), central takes
/// arithmetic means. Inflow through the outer boundary carries far_value;
/// the surface face carries the reconstructed trace.
void assemble_advection(TransportSystem& sys, const AxiGrid& grid,
                        const VelocityModel& model, double rho_g, double far_value,
                        SurfaceRecon recon, int block);

/// Advective face fluxes A_f*(w . n) with n in the +theta / +r direction;
/// phi_r is n_theta x (n_r+1), phi_theta is (n_theta+1) x n_r. Exposed for
/// the sign audits.
struct AdvectiveFluxes {
    std::vector<double> phi_r;
    std::vector<double> phi_theta;
};

AdvectiveFluxes advective_fluxes(const AxiGrid& grid, const VelocityModel& model,
                                 double rho_g, double R, double Rdot);

/// Outer Dirichlet rows via a two-point closure on the outermost face.
void apply_dirichlet_far(TransportSystem& sys, const AxiGrid& grid, double alpha,
                         double value, int block);

/// Dirichlet closure at r = 1; used by manufactured-solution studies, the
/// production boundary there is the Robin coupling below.
void apply_dirichlet_surface(TransportSystem& sys, const AxiGrid& grid, double alpha,
                             double value, int block);

/// Surface traces of both fields at the linearization point.
struct SurfaceValues {
    std::vector<double> T_s;
    std::vector<double> rho_s;
};

SurfaceValues surface_values(const Field& T, const Field& rho, const AxiGrid& grid,
                             SurfaceRecon recon);

struct RobinOptions {
    /// Sign of the evaporative-cooling flux in the temperature rows.
    /// Flipping it is a verify-suite mutation fixture, nothing else.
    double temperature_flux_sign = +1.0;
};

/// Hertz-Knudsen rows for one variable of the monolithic system, linearized
/// at `lin`: J ~ J_m + C*rho_sat'(T_s)*(T_s - T_s^m) - C*(rho_s - rho_s^m).
/// Temperature rows receive +A*latent_factor*J/R (heat sink), vapor rows
/// -A*J/R (mass source). Requires n_blocks == 2.
void apply_robin_newton(TransportSystem& sys, const AxiGrid& grid,
                        const MaterialParams& params, const SurfaceValues& lin,
                        SurfaceRecon recon, FieldKind kind, RobinOptions opts = {});

/// Linear Robin rows of the upper/lower-solution iteration: the variable's
/// own trace enters the left-hand side with coefficient L (temperature,
/// times the latent factor) or C_hk (vapor); everything else is lagged into
/// the right-hand side. Single-block systems.
void apply_robin_picard(TransportSystem& sys, const AxiGrid& grid,
                        const MaterialParams& params, double lipschitz_L,
                        const SurfaceValues& prev, SurfaceRecon recon, FieldKind kind);

/// Direct solve with relative residual ||Ax-b||/||b|| <= 1e-10 enforced;
/// throws SolverError with a diagnostic otherwise.
Eigen::VectorXd solve_sparse(const TransportSystem& sys);

/// Reusable factorization for time loops: the pattern is analyzed once,
/// values re-factorized per call.
class SparseDirectSolver {
public:
    Eigen::VectorXd solve(const TransportSystem& sys);
    Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b);

private:
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    bool analyzed_ = false;
    int analyzed_size_ = -1;
    long analyzed_nnz_ = -1;
};

struct MMatrixReport {
    bool ok = true;
    int rows_checked = 0;
    int bad_rows = 0;
    double worst_offdiag = 0.0;    // most positive off-diagonal entry
    double worst_diag = 0.0;       // most negative diagonal entry (0 if all fine)
    double worst_dominance = 0.0;  // most negative row sum
    std::string first_failure;
};

/// Row-by-row M-matrix audit: diagonal > 0, off-diagonals <= 0, weak
/// diagonal dominance. The discrete maximum-principle certificate.
MMatrixReport audit_m_matrix(const Eigen::SparseMatrix<double>& A, double tol_rel = 1e-12);

/// Audits the diagonal blocks of a system (both variables of a monolithic
/// assembly, or the single block of a Picard system).
MMatrixReport audit_m_matrix_blocks(const TransportSystem& sys, double tol_rel = 1e-12);

/// Coordinate triplet text dump (row col value per line) for debugging.
void dump_matrix(const TransportSystem& sys, std::ostream& os);

}  // namespace evap
