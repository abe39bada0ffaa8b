#pragma once

#include <vector>

namespace evap {

/// Discrete-time radius trajectory on a uniform grid; the object the
/// Volterra operator maps. Rates are backward differences with rate[0] = 0,
/// and the discrete H1(I) norm is (sum dt*R_n^2 + sum dt*Rdot_n^2)^(1/2)
/// over n >= 1.
struct RadiusPath {
    std::vector<double> times;
    std::vector<double> values;

    int n_steps() const { return static_cast<int>(times.size()) - 1; }
    double dt() const;
    double r0() const { return values.empty() ? 0.0 : values.front(); }
    double min_value() const;

    std::vector<double> rates() const;
    double h1_norm() const;

    static RadiusPath constant(double R0, double dt, int n_steps);
};

double h1_distance(const RadiusPath& a, const RadiusPath& b);
double sup_distance(const RadiusPath& a, const RadiusPath& b);

/// Sigma membership: correct initial value, rate bound |Rdot| <= bound.
bool is_admissible(const RadiusPath& path, double R0, double rate_bound,
                   double tol_rel = 1e-12);

}  // namespace evap
