#pragma once

#include <vector>

#include "evap/geometry.hpp"

namespace evap {

enum class FieldKind { Temperature, VaporDensity };

/// Cell-centered scalar field on an AxiGrid, row-major (i*n_r + j).
struct Field {
    FieldKind kind = FieldKind::Temperature;
    int n_theta = 0;
    int n_r = 0;
    std::vector<double> v;

    double& operator()(int i, int j) { return v[i * n_r + j]; }
    double operator()(int i, int j) const { return v[i * n_r + j]; }

    double min_value() const;
    double max_value() const;
    bool all_finite() const;

    static Field constant(const AxiGrid& grid, FieldKind kind, double value);
};

/// Surface-trace reconstruction at r = 1 from the first two radial layers.
/// Linear extrapolation is second-order at the face; first-order falls back
/// to the first cell value (monotone in the cell values).
enum class SurfaceRecon { LinearExtrapolation, FirstOrder };

struct ReconWeights {
    double e0 = 1.0;  // weight of cell (i, 0)
    double e1 = 0.0;  // weight of cell (i, 1)
};

ReconWeights recon_weights(const AxiGrid& grid, SurfaceRecon recon);

/// Trace values u_s(i) = e0*u(i,0) + e1*u(i,1) for every surface cell.
std::vector<double> surface_trace(const Field& f, const AxiGrid& grid, SurfaceRecon recon);

}  // namespace evap
