#include <complex>
#include <vector>

#include "thermoshape/common.hpp"
#include "thermoshape/fem.hpp"
#include "thermoshape/mesh.hpp"
#include "thermoshape/sensitivity.hpp"

namespace thermoshape {

using Cplx = std::complex<double>;

ComplexField material_derivative(const ComplexTransmissionSystem& sys,
                                 const ComplexField& u, const VectorField& v) {
    const Mesh& m = sys.mesh();
    const int n = m.num_vertices();
    if (u.size() != n || v.size() != n)
        throw ConfigError("material_derivative: field size does not match the mesh");

    const PhysicalCoefficients& coef = sys.coefficients();
    std::vector<Cplx> rhs(n, Cplx(0.0, 0.0));

    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& tv = m.tri[c];
        const CellGeometry g = cell_geometry(m, c);
        const int region = m.region[c];
        const double sigma = coef.sigma(region);
        const double k = coef.k(region);
        const double Q = coef.Q(region);

        // Edot = [v1-v0, v2-v0], A = Edot E^-1, M = A + A^T, div = tr A.
        const Vec2 w0 = v.at(tv[0]), w1 = v.at(tv[1]), w2 = v.at(tv[2]);
        const double ed[2][2] = {{w1.x - w0.x, w2.x - w0.x},
                                 {w1.y - w0.y, w2.y - w0.y}};
        double A[2][2];
        for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s)
                A[r][s] = ed[r][0] * g.inv_e[0][s] + ed[r][1] * g.inv_e[1][s];
        const double div = A[0][0] + A[1][1];
        const double M[2][2] = {{2.0 * A[0][0], A[0][1] + A[1][0]},
                                {A[1][0] + A[0][1], 2.0 * A[1][1]}};

        // Constant complex gradient of u on the cell.
        Cplx gu_x(0.0, 0.0), gu_y(0.0, 0.0);
        Cplx usum(0.0, 0.0);
        for (int j = 0; j < 3; ++j) {
            const Cplx uj(u.re[tv[j]], u.im[tv[j]]);
            gu_x += uj * g.grad_lambda[j].x;
            gu_y += uj * g.grad_lambda[j].y;
            usum += uj;
        }

        for (int i = 0; i < 3; ++i) {
            const Vec2 gl = g.grad_lambda[i];
            // sigma grad u . (M grad lambda_i), times |K|.
            const Cplx t1 = sigma * g.area *
                            (gu_x * (M[0][0] * gl.x + M[0][1] * gl.y) +
                             gu_y * (M[1][0] * gl.x + M[1][1] * gl.y));
            // (sigma grad u . grad lambda_i) |K| + k int u lambda_i - Q |K|/3,
            // all times the cell divergence.
            const Cplx stiff = sigma * g.area * (gu_x * gl.x + gu_y * gl.y);
            const Cplx mass = k * (g.area / 12.0) * (usum + Cplx(u.re[tv[i]], u.im[tv[i]]));
            const Cplx load = Q * g.area / 3.0;
            rhs[tv[i]] += t1 - (stiff + mass - load) * div;
        }
    }

    return sys.solve_zero_dirichlet(rhs);
}

}  // namespace thermoshape
