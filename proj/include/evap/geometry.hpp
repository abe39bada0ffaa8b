#pragma once

#include <ostream>
#include <vector>

namespace evap {

/// Structured axisymmetric control-volume mesh of the rescaled shell
/// { 1 <= r <= r_out, 0 <= theta <= pi }. Theta faces are uniform, radial
/// layer widths grow geometrically by `stretch` starting at the droplet
/// surface. All measures (cell volumes, face areas) are exact closed-form
/// integrals of the axisymmetric volume element 2*pi*r^2*sin(theta).
struct AxiGrid {
    int n_theta = 0;
    int n_r = 0;
    double r_out = 0.0;
    double stretch = 1.0;

    std::vector<double> theta_faces;  // size n_theta+1, [0, pi]
    std::vector<double> r_faces;      // size n_r+1, [1, r_out]
    std::vector<double> theta_c;      // cell centers (face midpoints)
    std::vector<double> r_c;

    std::vector<double> vol;          // n_theta*n_r, row-major cell(i,j)
    std::vector<double> area_r;       // radial faces, n_theta*(n_r+1)
    std::vector<double> area_theta;   // polar faces, (n_theta+1)*n_r; zero on the axis

    int cell(int i, int j) const { return i * n_r + j; }
    int n_cells() const { return n_theta * n_r; }
    double radial_area(int i, int j) const { return area_r[i * (n_r + 1) + j]; }
    double polar_area(int i, int j) const { return area_theta[i * n_r + j]; }

    double total_volume() const;
    /// Shell volume in closed form, (4*pi/3)*(r_out^3 - 1).
    double exact_volume() const;
};

/// Builds the mesh. Layer widths form the geometric sequence
/// dr_{j+1} = stretch * dr_j with dr_0 solved so the layers tile [1, r_out]
/// exactly. Throws std::invalid_argument on n_theta < 4, n_r < 4,
/// r_out <= 1, or stretch < 1.
AxiGrid build_grid(int n_theta, int n_r, double r_out, double stretch);

/// Quadrature weights on the droplet surface r = 1:
/// w_i = 2*pi*(cos(theta_i) - cos(theta_{i+1})), summing to 4*pi.
std::vector<double> surface_weights(const AxiGrid& grid);

/// Grid echo (faces, centers, volumes) as CSV for inspection.
void dump_grid_csv(const AxiGrid& grid, std::ostream& os);

}  // namespace evap
