// Nodal-field integrals and the skin-profile sampling helper.

#include <algorithm>
#include <cmath>

#include "thermoshape/fem.hpp"
#include "thermoshape/kernels.hpp"

namespace thermoshape {

double BoundaryProfile::eval(double x) const {
    if (s.empty()) throw ConfigError("BoundaryProfile: empty profile");
    if (x <= s.front()) return value.front();
    if (x >= s.back()) return value.back();
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - s.begin());
    const double t = (x - s[i - 1]) / (s[i] - s[i - 1]);
    return (1.0 - t) * value[i - 1] + t * value[i];
}

double BoundaryProfile::max_abs() const {
    double m = 0.0;
    for (double v : value) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// Gathers the midpoint-rule samples of a nodal field: for each cell the three
// edge-midpoint values, each weighted by area/3.  f^2 is quadratic, so the
// reduction computes the exact L2 integral of P1 data.
void midpoint_samples(const Mesh& m, const std::vector<double>& f,
                      std::vector<double>& w, std::vector<double>& v) {
    const int nc = m.num_cells();
    w.resize(3 * nc);
    v.resize(3 * nc);
    for (int c = 0; c < nc; ++c) {
        const auto& t = m.tri[c];
        const double third = cell_geometry(m, c).area / 3.0;
        for (int e = 0; e < 3; ++e) {
            w[3 * c + e] = third;
            v[3 * c + e] = 0.5 * (f[t[(e + 1) % 3]] + f[t[(e + 2) % 3]]);
        }
    }
}

void gradient_samples(const Mesh& m, const std::vector<double>& f,
                      std::vector<double>& w, std::vector<double>& gx,
                      std::vector<double>& gy) {
    const int nc = m.num_cells();
    w.resize(nc);
    gx.resize(nc);
    gy.resize(nc);
    for (int c = 0; c < nc; ++c) {
        const auto& t = m.tri[c];
        const CellGeometry g = cell_geometry(m, c);
        double dx = 0.0, dy = 0.0;
        for (int i = 0; i < 3; ++i) {
            dx += f[t[i]] * g.grad_lambda[i].x;
            dy += f[t[i]] * g.grad_lambda[i].y;
        }
        w[c] = g.area;
        gx[c] = dx;
        gy[c] = dy;
    }
}

}  // namespace

double l2_norm(const Mesh& m, const std::vector<double>& f) {
    std::vector<double> w, v;
    midpoint_samples(m, f, w, v);
    return std::sqrt(kernels::wsq(w.data(), v.data(), w.size()));
}

double h1_seminorm(const Mesh& m, const std::vector<double>& f) {
    std::vector<double> w, gx, gy;
    gradient_samples(m, f, w, gx, gy);
    return std::sqrt(kernels::wsq(w.data(), gx.data(), w.size()) +
                     kernels::wsq(w.data(), gy.data(), w.size()));
}

double l2_norm(const Mesh& m, const ComplexField& f) {
    const double a = l2_norm(m, f.re);
    const double b = l2_norm(m, f.im);
    return std::sqrt(a * a + b * b);
}

double h1_seminorm(const Mesh& m, const ComplexField& f) {
    const double a = h1_seminorm(m, f.re);
    const double b = h1_seminorm(m, f.im);
    return std::sqrt(a * a + b * b);
}

double h1_norm(const Mesh& m, const ComplexField& f) {
    const double a = l2_norm(m, f);
    const double b = h1_seminorm(m, f);
    return std::sqrt(a * a + b * b);
}

}  // namespace thermoshape
