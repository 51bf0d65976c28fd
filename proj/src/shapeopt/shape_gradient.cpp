// Nodal assembly of the distributed shape derivative.
//
// For P1 state u, adjoint p and a P1 deformation field theta vanishing on the
// box boundary,
//   dJ[theta] = sum_K  1/2 int_K (u^i)^2 div theta
//             - sigma_K int_K div theta * Im(grad u . grad conj p)
//             + sigma_K int_K (D theta + D theta^T) : Im(grad u (x) grad conj p)
//             - k_K     int_K div theta * Im(u conj p)
//             - Q_K     int_K div theta * p^i
// where all gradients are cellwise constant and div theta|_K =
// sum_i theta_i . grad lambda_i.  Because sigma, k, Q are constant per cell,
// no coefficient-gradient terms appear.  The k and source contributions enter
// with a minus sign; the finite-difference probes in the test suite pin the
// overall signs.
//
// Organized as a nodal vector g with dJ[theta] = sum_i g_i . theta_i so the
// same assembly feeds the Riesz solve and the directional probes.

#include "thermoshape/shapeopt.hpp"

namespace thermoshape {

namespace {
// Signs of the perfusion (k) and source (Q) divergence terms.
constexpr double kSignPerfusion = -1.0;
constexpr double kSignSource = -1.0;
}  // namespace

VectorField shape_gradient(const Mesh& m, const PhysicalCoefficients& coef,
                           const ComplexField& u, const ComplexField& p) {
    if (u.size() != m.num_vertices() || p.size() != m.num_vertices())
        throw ConfigError("shape_gradient: field size does not match mesh");

    VectorField g(m.num_vertices());
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.tri[c];
        const CellGeometry geo = cell_geometry(m, c);
        const double sig = coef.sigma(m.region[c]);
        const double kk = coef.k(m.region[c]);
        const double qq = coef.Q(m.region[c]);

        Vec2 gur{0, 0}, gui{0, 0}, gpr{0, 0}, gpi{0, 0};
        for (int i = 0; i < 3; ++i) {
            gur = gur + u.re[t[i]] * geo.grad_lambda[i];
            gui = gui + u.im[t[i]] * geo.grad_lambda[i];
            gpr = gpr + p.re[t[i]] * geo.grad_lambda[i];
            gpi = gpi + p.im[t[i]] * geo.grad_lambda[i];
        }

        // int_K (u^i)^2 and int_K Im(u conj p) = int (u^i p^r - u^r p^i):
        // quadratic integrands, midpoint rule is exact.
        double int_ui_sq = 0.0, int_im_upbar = 0.0;
        for (int e = 0; e < 3; ++e) {
            const int a = t[(e + 1) % 3], b = t[(e + 2) % 3];
            const double ui = 0.5 * (u.im[a] + u.im[b]);
            const double ur = 0.5 * (u.re[a] + u.re[b]);
            const double pr = 0.5 * (p.re[a] + p.re[b]);
            const double pi = 0.5 * (p.im[a] + p.im[b]);
            int_ui_sq += ui * ui;
            int_im_upbar += ui * pr - ur * pi;
        }
        int_ui_sq *= geo.area / 3.0;
        int_im_upbar *= geo.area / 3.0;

        // int_K p^i (linear integrand).
        const double int_pi =
            geo.area / 3.0 * (p.im[t[0]] + p.im[t[1]] + p.im[t[2]]);

        // Im(grad u . grad conj p) and the 2x2 moment Im(grad u (x) grad conj p).
        const double cross = dot(gui, gpr) - dot(gur, gpi);
        const double M[2][2] = {
            {gui.x * gpr.x - gur.x * gpi.x, gui.x * gpr.y - gur.x * gpi.y},
            {gui.y * gpr.x - gur.y * gpi.x, gui.y * gpr.y - gur.y * gpi.y}};
        const double S[2][2] = {{2.0 * M[0][0], M[0][1] + M[1][0]},
                                {M[0][1] + M[1][0], 2.0 * M[1][1]}};

        // All div-theta terms share the factor grad lambda_i.
        const double div_coef = 0.5 * int_ui_sq - sig * cross * geo.area +
                                kSignPerfusion * kk * int_im_upbar +
                                kSignSource * qq * int_pi;

        for (int i = 0; i < 3; ++i) {
            const Vec2 gl = geo.grad_lambda[i];
            g.x[t[i]] += div_coef * gl.x +
                         sig * geo.area * (S[0][0] * gl.x + S[1][0] * gl.y);
            g.y[t[i]] += div_coef * gl.y +
                         sig * geo.area * (S[0][1] * gl.x + S[1][1] * gl.y);
        }
    }
    return g;
}

VectorField volume_gradient(const Mesh& m) {
    VectorField g(m.num_vertices());
    for (int c = 0; c < m.num_cells(); ++c) {
        if (m.region[c] != 0) continue;
        const CellGeometry geo = cell_geometry(m, c);
        for (int i = 0; i < 3; ++i) {
            g.x[m.tri[c][i]] += geo.area * geo.grad_lambda[i].x;
            g.y[m.tri[c][i]] += geo.area * geo.grad_lambda[i].y;
        }
    }
    return g;
}

}  // namespace thermoshape
