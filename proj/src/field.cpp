#include "evap/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evap {

double Field::min_value() const {
    return *std::min_element(v.begin(), v.end());
}

double Field::max_value() const {
    return *std::max_element(v.begin(), v.end());
}

bool Field::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

Field Field::constant(const AxiGrid& grid, FieldKind kind, double value) {
    Field f;
    f.kind = kind;
    f.n_theta = grid.n_theta;
    f.n_r = grid.n_r;
    f.v.assign(static_cast<size_t>(grid.n_cells()), value);
    return f;
}

ReconWeights recon_weights(const AxiGrid& grid, SurfaceRecon recon) {
    if (recon == SurfaceRecon::FirstOrder) return {1.0, 0.0};
    const double r0 = grid.r_c[0], r1 = grid.r_c[1];
    return {(r1 - 1.0) / (r1 - r0), (1.0 - r0) / (r1 - r0)};
}

std::vector<double> surface_trace(const Field& f, const AxiGrid& grid, SurfaceRecon recon) {
    if (f.n_theta != grid.n_theta || f.n_r != grid.n_r)
        throw std::invalid_argument("surface_trace: field does not match grid");
    const ReconWeights w = recon_weights(grid, recon);
    std::vector<double> tr(grid.n_theta);
    for (int i = 0; i < grid.n_theta; ++i) tr[i] = w.e0 * f(i, 0) + w.e1 * f(i, 1);
    return tr;
}

}  // namespace evap
