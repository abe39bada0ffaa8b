#include "evap/radius_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evap {

double RadiusPath::dt() const {
    if (times.size() < 2) throw std::invalid_argument("RadiusPath: needs at least two nodes");
    return times[1] - times[0];
}

double RadiusPath::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

std::vector<double> RadiusPath::rates() const {
    std::vector<double> r(values.size(), 0.0);
    const double h = dt();
    for (size_t n = 1; n < values.size(); ++n) r[n] = (values[n] - values[n - 1]) / h;
    return r;
}

double RadiusPath::h1_norm() const {
    const double h = dt();
    const std::vector<double> rate = rates();
    double s = 0.0;
    for (size_t n = 1; n < values.size(); ++n)
        s += h * (values[n] * values[n] + rate[n] * rate[n]);
    return std::sqrt(s);
}

RadiusPath RadiusPath::constant(double R0, double dt, int n_steps) {
    RadiusPath p;
    p.times.resize(n_steps + 1);
    p.values.assign(n_steps + 1, R0);
    for (int n = 0; n <= n_steps; ++n) p.times[n] = n * dt;
    return p;
}

namespace {
void check_same_grid(const RadiusPath& a, const RadiusPath& b) {
    if (a.times.size() != b.times.size())
        throw std::invalid_argument("RadiusPath: paths live on different time grids");
}
}  // namespace

double h1_distance(const RadiusPath& a, const RadiusPath& b) {
    check_same_grid(a, b);
    RadiusPath d;
    d.times = a.times;
    d.values.resize(a.values.size());
    for (size_t n = 0; n < a.values.size(); ++n) d.values[n] = a.values[n] - b.values[n];
    return d.h1_norm();
}

double sup_distance(const RadiusPath& a, const RadiusPath& b) {
    check_same_grid(a, b);
    double s = 0.0;
    for (size_t n = 0; n < a.values.size(); ++n)
        s = std::max(s, std::abs(a.values[n] - b.values[n]));
    return s;
}

bool is_admissible(const RadiusPath& path, double R0, double rate_bound, double tol_rel) {
    if (path.values.empty() || path.values.front() != R0) return false;
    const double tol = tol_rel * std::max(rate_bound, 1.0);
    for (double r : path.rates())
        if (std::abs(r) > rate_bound + tol) return false;
    return true;
}

}  // namespace evap
