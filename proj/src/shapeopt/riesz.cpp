// Riesz representative of the (negative) shape gradient in the smoothing
// form b.  The form acts componentwise on P1 vector fields, so one scalar
// SPD matrix
//   B = cb (S + M) + (1 - cb) T
// serves both components; S and M are the unit-coefficient stiffness and
// mass matrices, and T is the interface tangential form, per interface edge
// (a, b):  t(v, w) = (v_b - v_a)(w_b - w_a) / |e|.
// Fields vanish on the box boundary (Dirichlet rows eliminated).

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>

#include "thermoshape/shapeopt.hpp"

namespace thermoshape {

namespace {
using SpMat = Eigen::SparseMatrix<double>;
}

DescentField riesz_descent_field(const Mesh& m, const VectorField& g, double cb) {
    if (!(cb > 0.0) || !(cb <= 1.0))
        throw ConfigError("riesz_descent_field: cb must lie in (0, 1]");
    if (g.size() != m.num_vertices())
        throw ConfigError("riesz_descent_field: gradient size does not match mesh");

    const int nv = m.num_vertices();
    const std::vector<char> on_box = m.boundary_vertex_mask();
    std::vector<int> free_of_vertex(nv, -1), vertex_of_free;
    for (int v = 0; v < nv; ++v)
        if (!on_box[v]) {
            free_of_vertex[v] = static_cast<int>(vertex_of_free.size());
            vertex_of_free.push_back(v);
        }
    const int nf = static_cast<int>(vertex_of_free.size());

    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](int vi, int vj, double val) {
        const int fi = free_of_vertex[vi], fj = free_of_vertex[vj];
        if (fi >= 0 && fj >= 0) trip.emplace_back(fi, fj, val);
    };

    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.tri[c];
        const CellGeometry geo = cell_geometry(m, c);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                add(t[i], t[j],
                    cb * (geo.area * dot(geo.grad_lambda[i], geo.grad_lambda[j]) +
                          geo.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0)));
    }
    for (const auto& e : m.interface_edges()) {
        const double len = norm(m.xy[e[1]] - m.xy[e[0]]);
        const double w = (1.0 - cb) / len;
        add(e[0], e[0], w);
        add(e[1], e[1], w);
        add(e[0], e[1], -w);
        add(e[1], e[0], -w);
    }

    SpMat B(nf, nf);
    B.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(B);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("riesz_descent_field: factorization failed");

    // max absolute column sum == infinity norm (B is symmetric); used by the
    // backward-error check below.
    double bnorm = 0.0;
    for (int k = 0; k < B.outerSize(); ++k) {
        double col = 0.0;
        for (SpMat::InnerIterator it(B, k); it; ++it) col += std::fabs(it.value());
        bnorm = std::max(bnorm, col);
    }

    DescentField out;
    out.theta = VectorField(nv);
    Eigen::VectorXd rhs(nf);
    for (int comp = 0; comp < 2; ++comp) {
        const std::vector<double>& gc = comp == 0 ? g.x : g.y;
        std::vector<double>& tc = comp == 0 ? out.theta.x : out.theta.y;
        for (int f = 0; f < nf; ++f) rhs[f] = -gc[vertex_of_free[f]];
        Eigen::VectorXd x = ldlt.solve(rhs);
        // Small cb makes B badly scaled (volume block ~ cb, interface block
        // ~ 1, so |x| >> |rhs|): judge the solve by the normwise backward
        // error, which stays near machine precision whenever the solve is
        // correct, and polish with iterative refinement first.
        auto backward_error = [&](const Eigen::VectorXd& y) {
            return (B * y - rhs).norm() /
                   std::max(bnorm * y.norm() + rhs.norm(), 1e-300);
        };
        double rel = backward_error(x);
        for (int round = 0; round < 2 && !(rel <= 1e-10); ++round) {
            x += ldlt.solve(rhs - B * x);
            rel = backward_error(x);
        }
        if (!(rel <= 1e-10))
            throw NumericalError("riesz_descent_field: backward error " +
                                 sci(rel) + " exceeds 1e-10");
        for (int f = 0; f < nf; ++f) tc[vertex_of_free[f]] = x[f];
    }

    // b(theta, theta) = -dJ[theta]; tiny negative values can appear at
    // stationary points through roundoff.
    out.hnorm_sq = std::max(0.0, -apply_gradient(g, out.theta));
    return out;
}

double hform_inner(const Mesh& m, const VectorField& a, const VectorField& b,
                   double cb) {
    if (a.size() != m.num_vertices() || b.size() != m.num_vertices())
        throw ConfigError("hform_inner: field size does not match mesh");

    double acc = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.tri[c];
        const CellGeometry geo = cell_geometry(m, c);
        Vec2 gax{0, 0}, gay{0, 0}, gbx{0, 0}, gby{0, 0};
        for (int i = 0; i < 3; ++i) {
            gax = gax + a.x[t[i]] * geo.grad_lambda[i];
            gay = gay + a.y[t[i]] * geo.grad_lambda[i];
            gbx = gbx + b.x[t[i]] * geo.grad_lambda[i];
            gby = gby + b.y[t[i]] * geo.grad_lambda[i];
        }
        double cell = geo.area * (dot(gax, gbx) + dot(gay, gby));
        // mass part, midpoint rule (exact for the quadratic integrand)
        double mass = 0.0;
        for (int e = 0; e < 3; ++e) {
            const int va = t[(e + 1) % 3], vb = t[(e + 2) % 3];
            const double ax = 0.5 * (a.x[va] + a.x[vb]);
            const double ay = 0.5 * (a.y[va] + a.y[vb]);
            const double bx = 0.5 * (b.x[va] + b.x[vb]);
            const double by = 0.5 * (b.y[va] + b.y[vb]);
            mass += ax * bx + ay * by;
        }
        acc += cb * (cell + geo.area / 3.0 * mass);
    }
    for (const auto& e : m.interface_edges()) {
        const double len = norm(m.xy[e[1]] - m.xy[e[0]]);
        const double dxa = a.x[e[1]] - a.x[e[0]], dya = a.y[e[1]] - a.y[e[0]];
        const double dxb = b.x[e[1]] - b.x[e[0]], dyb = b.y[e[1]] - b.y[e[0]];
        acc += (1.0 - cb) * (dxa * dxb + dya * dyb) / len;
    }
    return acc;
}

}  // namespace thermoshape
