// Real-valued forward model on the two-region mesh, P1 or P2.
//
// Weak form over the space vanishing on the base edge:
//   int sigma grad u . grad v + k u v + alpha int_skin u v
//     = int f v + alpha int_skin Ta v - int_lateral g v
// with u = u_D on the base.  The physical model has f = Q per region,
// u_D = Tb, Ta constant and g = 0 (insulated sides); the hooks exist so the
// same assembly can be driven by manufactured solutions.

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "thermoshape/fem.hpp"
#include "thermoshape/quadrature.hpp"

namespace thermoshape {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Values and gradients of the local basis at a barycentric point.
// For degree 2 the local ordering is [v0 v1 v2 e0 e1 e2] where edge l joins
// vertices (l+1)%3 and (l+2)%3.
void eval_basis(int degree, const CellGeometry& g, const quad::TriPoint& q,
                double* N, Vec2* dN) {
    const double l[3] = {q.l0, q.l1, q.l2};
    if (degree == 1) {
        for (int i = 0; i < 3; ++i) {
            N[i] = l[i];
            dN[i] = g.grad_lambda[i];
        }
        return;
    }
    for (int i = 0; i < 3; ++i) {
        N[i] = l[i] * (2.0 * l[i] - 1.0);
        dN[i] = (4.0 * l[i] - 1.0) * g.grad_lambda[i];
    }
    for (int e = 0; e < 3; ++e) {
        const int a = (e + 1) % 3, b = (e + 2) % 3;
        N[3 + e] = 4.0 * l[a] * l[b];
        dN[3 + e] = 4.0 * (l[a] * g.grad_lambda[b] + l[b] * g.grad_lambda[a]);
    }
}

// Trace of the basis on a boundary edge, parameterized by t in [0,1]
// (endpoint a at t=0, endpoint b at t=1, optional midpoint dof).
void eval_edge_basis(int degree, double t, double* N) {
    if (degree == 1) {
        N[0] = 1.0 - t;
        N[1] = t;
        return;
    }
    N[0] = (1.0 - t) * (1.0 - 2.0 * t);
    N[1] = t * (2.0 * t - 1.0);
    N[2] = 4.0 * t * (1.0 - t);
}

}  // namespace

std::pair<std::vector<double>, BoundaryProfile> solve_forward_real(
    const Mesh& m, const PhysicalCoefficients& coef, int degree,
    const ForwardData* data) {
    if (degree != 1 && degree != 2)
        throw ConfigError("solve_forward_real: degree must be 1 or 2");

    const int nv = m.num_vertices();

    // Global dofs: vertices first, then (for P2) one dof per edge.
    std::map<std::pair<int, int>, int> edge_dof;
    auto edge_index = [&](int a, int b) {
        return edge_dof.at(std::minmax(a, b));
    };
    int ndof = nv;
    if (degree == 2) {
        for (const auto& t : m.tri)
            for (int e = 0; e < 3; ++e) {
                const auto key = std::minmax(t[(e + 1) % 3], t[(e + 2) % 3]);
                if (edge_dof.emplace(key, ndof).second) ++ndof;
            }
    }

    auto dof_position = [&](int d) -> Vec2 {
        if (d < nv) return m.xy[d];
        for (const auto& [key, idx] : edge_dof)
            if (idx == d) return 0.5 * (m.xy[key.first] + m.xy[key.second]);
        throw ConfigError("solve_forward_real: bad dof index");
    };

    // Dirichlet set: base vertices, plus base edge midpoints for P2.
    std::vector<char> fixed(ndof, 0);
    for (const auto& be : m.bedge)
        if (be[2] == kTagBase) {
            fixed[be[0]] = 1;
            fixed[be[1]] = 1;
            if (degree == 2) fixed[edge_index(be[0], be[1])] = 1;
        }

    std::vector<int> free_of_dof(ndof, -1), dof_of_free;
    for (int d = 0; d < ndof; ++d)
        if (!fixed[d]) {
            free_of_dof[d] = static_cast<int>(dof_of_free.size());
            dof_of_free.push_back(d);
        }
    const int nf = static_cast<int>(dof_of_free.size());

    std::vector<Eigen::Triplet<double>> tff, tfb;
    auto add = [&](int di, int dj, double val) {
        const int fi = free_of_dof[di];
        if (fi < 0) return;
        const int fj = free_of_dof[dj];
        if (fj >= 0)
            tff.emplace_back(fi, fj, val);
        else
            tfb.emplace_back(fi, dj, val);
    };

    Eigen::VectorXd rhs_full = Eigen::VectorXd::Zero(ndof);
    const int nb = degree == 1 ? 3 : 6;
    const auto& vol_rule = quad::tri_degree5;

    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.tri[c];
        const CellGeometry g = cell_geometry(m, c);
        const int region = m.region[c];
        const double sig = coef.sigma(region);
        const double kk = coef.k(region);

        int gdof[6];
        for (int i = 0; i < 3; ++i) gdof[i] = t[i];
        if (degree == 2)
            for (int e = 0; e < 3; ++e)
                gdof[3 + e] = edge_index(t[(e + 1) % 3], t[(e + 2) % 3]);

        double N[6];
        Vec2 dN[6];
        for (const auto& q : vol_rule) {
            eval_basis(degree, g, q, N, dN);
            const double w = q.w * g.area;
            const Vec2 x = q.l0 * m.xy[t[0]] + q.l1 * m.xy[t[1]] + q.l2 * m.xy[t[2]];
            const double f = (data && data->source) ? data->source(x, region)
                                                    : coef.Q(region);
            for (int i = 0; i < nb; ++i) {
                rhs_full[gdof[i]] += w * f * N[i];
                for (int j = 0; j < nb; ++j)
                    add(gdof[i], gdof[j],
                        w * (sig * dot(dN[i], dN[j]) + kk * N[i] * N[j]));
            }
        }
    }

    const int nbe = degree == 1 ? 2 : 3;
    for (const auto& be : m.bedge) {
        if (be[2] == kTagBase) continue;
        const Vec2 pa = m.xy[be[0]], pb = m.xy[be[1]];
        const double len = norm(pb - pa);
        int gdof[3] = {be[0], be[1], -1};
        if (degree == 2) gdof[2] = edge_index(be[0], be[1]);

        double N[3];
        for (const auto& q : quad::seg_gauss3) {
            eval_edge_basis(degree, q.t, N);
            const double w = q.w * len;
            const Vec2 x = (1.0 - q.t) * pa + q.t * pb;
            if (be[2] == kTagSkin) {
                const double ta = (data && data->robin_ambient)
                                      ? data->robin_ambient(x)
                                      : coef.Ta;
                for (int i = 0; i < nbe; ++i) {
                    rhs_full[gdof[i]] += w * coef.alpha * ta * N[i];
                    for (int j = 0; j < nbe; ++j)
                        add(gdof[i], gdof[j], w * coef.alpha * N[i] * N[j]);
                }
            } else if (data && data->lateral_flux) {
                const double gflux = data->lateral_flux(x);
                for (int i = 0; i < nbe; ++i)
                    rhs_full[gdof[i]] -= w * gflux * N[i];
            }
        }
    }

    // Dirichlet lift.
    Eigen::VectorXd lift = Eigen::VectorXd::Zero(ndof);
    for (int d = 0; d < ndof; ++d)
        if (fixed[d]) {
            const Vec2 x = dof_position(d);
            lift[d] = (data && data->dirichlet) ? data->dirichlet(x) : coef.Tb;
        }

    SpMat A_ff(nf, nf), A_fb(nf, ndof);
    A_ff.setFromTriplets(tff.begin(), tff.end());
    A_fb.setFromTriplets(tfb.begin(), tfb.end());

    Eigen::VectorXd b(nf);
    for (int f = 0; f < nf; ++f) b[f] = rhs_full[dof_of_free[f]];
    b -= A_fb * lift;

    Eigen::SimplicialLDLT<SpMat> ldlt(A_ff);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("forward solve: factorization failed");
    Eigen::VectorXd x = ldlt.solve(b);
    const double rel = (A_ff * x - b).norm() / std::max(b.norm(), 1e-300);
    if (!(rel <= 1e-10))
        throw NumericalError("forward solve: residual " + sci(rel) +
                             " exceeds 1e-10");

    std::vector<double> u(nv);
    for (int v = 0; v < nv; ++v)
        u[v] = fixed[v] ? lift[v] : x[free_of_dof[v]];

    // Skin trace sampled at skin vertices, ascending arc position.
    std::vector<char> on_skin(nv, 0);
    for (const auto& be : m.bedge)
        if (be[2] == kTagSkin) on_skin[be[0]] = on_skin[be[1]] = 1;
    std::vector<int> skin;
    for (int v = 0; v < nv; ++v)
        if (on_skin[v]) skin.push_back(v);
    std::sort(skin.begin(), skin.end(),
              [&](int a, int b) { return m.xy[a].x < m.xy[b].x; });

    BoundaryProfile prof;
    for (int v : skin) {
        prof.s.push_back(m.xy[v].x);
        prof.value.push_back(u[v]);
    }
    return {std::move(u), std::move(prof)};
}

}  // namespace thermoshape
