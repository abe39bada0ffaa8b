#include "evap/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace evap {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double AxiGrid::total_volume() const {
    double s = 0.0;
    for (double v : vol) s += v;
    return s;
}

double AxiGrid::exact_volume() const {
    return 4.0 * kPi / 3.0 * (r_out * r_out * r_out - 1.0);
}

AxiGrid build_grid(int n_theta, int n_r, double r_out, double stretch) {
    if (n_theta < 4) throw std::invalid_argument("build_grid: n_theta must be >= 4");
    if (n_r < 4) throw std::invalid_argument("build_grid: n_r must be >= 4");
    if (!(r_out > 1.0)) throw std::invalid_argument("build_grid: r_out must exceed 1");
    if (!(stretch >= 1.0)) throw std::invalid_argument("build_grid: stretch must be >= 1");

    AxiGrid g;
    g.n_theta = n_theta;
    g.n_r = n_r;
    g.r_out = r_out;
    g.stretch = stretch;

    g.theta_faces.resize(n_theta + 1);
    for (int i = 0; i <= n_theta; ++i) g.theta_faces[i] = kPi * i / n_theta;
    g.theta_faces[0] = 0.0;
    g.theta_faces[n_theta] = kPi;

    // geometric layer widths dr_{j+1} = stretch * dr_j tiling [1, r_out]
    g.r_faces.resize(n_r + 1);
    const double span = r_out - 1.0;
    double dr0;
    if (stretch == 1.0) {
        dr0 = span / n_r;
    } else {
        dr0 = span * (stretch - 1.0) / (std::pow(stretch, n_r) - 1.0);
    }
    g.r_faces[0] = 1.0;
    double dr = dr0;
    for (int j = 0; j < n_r; ++j) {
        g.r_faces[j + 1] = g.r_faces[j] + dr;
        dr *= stretch;
    }
    g.r_faces[n_r] = r_out;

    g.theta_c.resize(n_theta);
    for (int i = 0; i < n_theta; ++i)
        g.theta_c[i] = 0.5 * (g.theta_faces[i] + g.theta_faces[i + 1]);
    g.r_c.resize(n_r);
    for (int j = 0; j < n_r; ++j) g.r_c[j] = 0.5 * (g.r_faces[j] + g.r_faces[j + 1]);

    // exact integrals of 2*pi*r^2*sin(theta) over the cell / face
    std::vector<double> dcos(n_theta);
    for (int i = 0; i < n_theta; ++i)
        dcos[i] = std::cos(g.theta_faces[i]) - std::cos(g.theta_faces[i + 1]);

    g.vol.resize(n_theta * n_r);
    for (int i = 0; i < n_theta; ++i) {
        for (int j = 0; j < n_r; ++j) {
            const double r1 = g.r_faces[j], r2 = g.r_faces[j + 1];
            g.vol[g.cell(i, j)] = 2.0 * kPi / 3.0 * dcos[i] * (r2 * r2 * r2 - r1 * r1 * r1);
        }
    }

    g.area_r.resize(n_theta * (n_r + 1));
    for (int i = 0; i < n_theta; ++i)
        for (int j = 0; j <= n_r; ++j)
            g.area_r[i * (n_r + 1) + j] = 2.0 * kPi * g.r_faces[j] * g.r_faces[j] * dcos[i];

    g.area_theta.resize((n_theta + 1) * n_r);
    for (int i = 0; i <= n_theta; ++i) {
        // axis faces carry no flux: sin(0) = sin(pi) = 0 exactly
        const double s = (i == 0 || i == n_theta) ? 0.0 : std::sin(g.theta_faces[i]);
        for (int j = 0; j < n_r; ++j) {
            const double r1 = g.r_faces[j], r2 = g.r_faces[j + 1];
            g.area_theta[i * n_r + j] = kPi * s * (r2 * r2 - r1 * r1);
        }
    }
    return g;
}

std::vector<double> surface_weights(const AxiGrid& grid) {
    std::vector<double> w(grid.n_theta);
    for (int i = 0; i < grid.n_theta; ++i)
        w[i] = 2.0 * kPi *
               (std::cos(grid.theta_faces[i]) - std::cos(grid.theta_faces[i + 1]));
    return w;
}

void dump_grid_csv(const AxiGrid& grid, std::ostream& os) {
    os << "i,j,theta_c,r_c,volume\n";
    char buf[160];
    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 0; j < grid.n_r; ++j) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.12g,%.12g\n", i, j,
                          grid.theta_c[i], grid.r_c[j], grid.vol[grid.cell(i, j)]);
            os << buf;
        }
    }
}

}  // namespace evap
