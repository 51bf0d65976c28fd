// Assembly and factorization of the complex transmission operator.
//
// P1 elements.  The stiffness and mass blocks are real and symmetric; the
// skin Robin block enters with the complex weight (alpha + i), so the full
// matrix is complex symmetric (not Hermitian).  Base vertices carry the
// Dirichlet value and are eliminated.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <complex>
#include <vector>

#include "thermoshape/fem.hpp"
#include "thermoshape/quadrature.hpp"

namespace thermoshape {

namespace {
using Cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Cplx>;
using CVec = Eigen::VectorXcd;
}  // namespace

struct ComplexTransmissionSystem::Impl {
    const Mesh* mesh;  // not owned; must outlive the system
    PhysicalCoefficients coef;
    std::vector<int> free_of_vertex;  // vertex -> free index, -1 if on base
    std::vector<int> vertex_of_free;
    SpMat A_ff, A_fb;
    Eigen::SparseLU<SpMat> lu;

    int num_free() const { return static_cast<int>(vertex_of_free.size()); }

    CVec restrict_free(const std::vector<Cplx>& full) const {
        CVec out(num_free());
        for (int f = 0; f < num_free(); ++f) out[f] = full[vertex_of_free[f]];
        return out;
    }

    // Solves A_ff x = b and checks the algebraic residual.
    CVec solve_checked(const CVec& b) const {
        CVec x = lu.solve(b);
        if (lu.info() != Eigen::Success)
            throw NumericalError("complex system: LU solve failed");
        const double scale = std::max(b.norm(), 1e-300);
        const double rel = (A_ff * x - b).norm() / scale;
        if (!(rel <= 1e-10))
            throw NumericalError("complex system: residual " + sci(rel) +
                                 " exceeds 1e-10");
        return x;
    }

    ComplexField scatter(const CVec& x_free, Cplx base_value) const {
        ComplexField out(mesh->num_vertices());
        for (int v = 0; v < mesh->num_vertices(); ++v) {
            const Cplx z =
                free_of_vertex[v] >= 0 ? x_free[free_of_vertex[v]] : base_value;
            out.re[v] = z.real();
            out.im[v] = z.imag();
        }
        return out;
    }
};

ComplexTransmissionSystem::ComplexTransmissionSystem(const Mesh& mesh,
                                                     const PhysicalCoefficients& coef)
    : impl_(std::make_unique<Impl>()) {
    impl_->mesh = &mesh;
    impl_->coef = coef;

    const int nv = mesh.num_vertices();
    std::vector<char> on_base(nv, 0);
    for (const auto& be : mesh.bedge)
        if (be[2] == kTagBase) {
            on_base[be[0]] = 1;
            on_base[be[1]] = 1;
        }

    impl_->free_of_vertex.assign(nv, -1);
    for (int v = 0; v < nv; ++v)
        if (!on_base[v]) {
            impl_->free_of_vertex[v] = static_cast<int>(impl_->vertex_of_free.size());
            impl_->vertex_of_free.push_back(v);
        }
    const int nf = impl_->num_free();

    std::vector<Eigen::Triplet<Cplx>> tff, tfb;
    auto add = [&](int vi, int vj, Cplx val) {
        const int fi = impl_->free_of_vertex[vi];
        if (fi < 0) return;  // test functions vanish on the base
        const int fj = impl_->free_of_vertex[vj];
        if (fj >= 0)
            tff.emplace_back(fi, fj, val);
        else
            tfb.emplace_back(fi, vj, val);
    };

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& t = mesh.tri[c];
        const CellGeometry g = cell_geometry(mesh, c);
        const double sig = coef.sigma(mesh.region[c]);
        const double kk = coef.k(mesh.region[c]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double stiff =
                    sig * g.area * dot(g.grad_lambda[i], g.grad_lambda[j]);
                const double mass = kk * g.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
                add(t[i], t[j], Cplx(stiff + mass, 0.0));
            }
    }

    const Cplx robin(coef.alpha, 1.0);
    for (const auto& be : mesh.bedge) {
        if (be[2] != kTagSkin) continue;
        const double len = norm(mesh.xy[be[1]] - mesh.xy[be[0]]);
        const int v[2] = {be[0], be[1]};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                add(v[i], v[j], robin * (len * (i == j ? 1.0 / 3.0 : 1.0 / 6.0)));
    }

    impl_->A_ff.resize(nf, nf);
    impl_->A_ff.setFromTriplets(tff.begin(), tff.end());
    impl_->A_fb.resize(nf, nv);
    impl_->A_fb.setFromTriplets(tfb.begin(), tfb.end());

    impl_->lu.compute(impl_->A_ff);
    if (impl_->lu.info() != Eigen::Success)
        throw NumericalError("complex system: LU factorization failed");
}

ComplexTransmissionSystem::~ComplexTransmissionSystem() = default;
ComplexTransmissionSystem::ComplexTransmissionSystem(ComplexTransmissionSystem&&) noexcept =
    default;
ComplexTransmissionSystem& ComplexTransmissionSystem::operator=(
    ComplexTransmissionSystem&&) noexcept = default;

const Mesh& ComplexTransmissionSystem::mesh() const { return *impl_->mesh; }

const PhysicalCoefficients& ComplexTransmissionSystem::coefficients() const {
    return impl_->coef;
}

ComplexField ComplexTransmissionSystem::solve_state(const BoundaryProfile& h) const {
    const Mesh& m = *impl_->mesh;
    const PhysicalCoefficients& coef = impl_->coef;
    std::vector<Cplx> rhs(m.num_vertices(), Cplx(0.0, 0.0));

    for (int c = 0; c < m.num_cells(); ++c) {
        const double q = coef.Q(m.region[c]) * cell_geometry(m, c).area / 3.0;
        for (int i = 0; i < 3; ++i) rhs[m.tri[c][i]] += q;
    }

    for (const auto& be : m.bedge) {
        if (be[2] != kTagSkin) continue;
        const Vec2 pa = m.xy[be[0]], pb = m.xy[be[1]];
        const double len = norm(pb - pa);
        // alpha * Ta * int phi  (exact for the constant ambient value)
        rhs[be[0]] += coef.alpha * coef.Ta * len / 2.0;
        rhs[be[1]] += coef.alpha * coef.Ta * len / 2.0;
        // i * int h phi, measured profile sampled by 2-point Gauss
        for (const auto& qp : quad::seg_gauss2) {
            const double x = (1.0 - qp.t) * pa.x + qp.t * pb.x;
            const double hv = h.eval(x);
            rhs[be[0]] += Cplx(0.0, qp.w * len * hv * (1.0 - qp.t));
            rhs[be[1]] += Cplx(0.0, qp.w * len * hv * qp.t);
        }
    }

    CVec b = impl_->restrict_free(rhs);
    CVec lift = CVec::Constant(m.num_vertices(), Cplx(coef.Tb, 0.0));
    b -= impl_->A_fb * lift;

    return impl_->scatter(impl_->solve_checked(b), Cplx(coef.Tb, 0.0));
}

ComplexField ComplexTransmissionSystem::solve_adjoint(const ComplexField& u) const {
    const Mesh& m = *impl_->mesh;
    if (u.size() != m.num_vertices())
        throw ConfigError("solve_adjoint: field size does not match mesh");

    // rhs_i = int Im(u) phi_i  (unit-coefficient mass apply, exact for P1)
    std::vector<Cplx> rhs(m.num_vertices(), Cplx(0.0, 0.0));
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.tri[c];
        const double w = cell_geometry(m, c).area / 12.0;
        const double s = u.im[t[0]] + u.im[t[1]] + u.im[t[2]];
        for (int i = 0; i < 3; ++i) rhs[t[i]] += w * (s + u.im[t[i]]);
    }

    // The adjoint matrix is the entrywise conjugate of A, and the rhs is
    // real, so p = conj(A^{-1} rhs).
    CVec b = impl_->restrict_free(rhs);
    CVec x = impl_->solve_checked(b).conjugate();
    return impl_->scatter(x, Cplx(0.0, 0.0));
}

ComplexField ComplexTransmissionSystem::solve_zero_dirichlet(
    const std::vector<Cplx>& rhs) const {
    if (static_cast<int>(rhs.size()) != impl_->mesh->num_vertices())
        throw ConfigError("solve_zero_dirichlet: rhs size does not match mesh");
    CVec b = impl_->restrict_free(rhs);
    return impl_->scatter(impl_->solve_checked(b), Cplx(0.0, 0.0));
}

double ComplexTransmissionSystem::coercivity_quotient(
    const std::vector<Cplx>& v) const {
    if (static_cast<int>(v.size()) != impl_->mesh->num_vertices())
        throw ConfigError("coercivity_quotient: vector size does not match mesh");
    CVec vf = impl_->restrict_free(v);
    const double nn = vf.squaredNorm();
    if (nn == 0.0) throw ConfigError("coercivity_quotient: zero vector");
    const Cplx num = vf.dot(impl_->A_ff * vf);  // Eigen dot conjugates the left arg
    return num.real() / nn;
}

ComplexField solve_complex_state(const Mesh& m, const PhysicalCoefficients& coef,
                                 const BoundaryProfile& h) {
    return ComplexTransmissionSystem(m, coef).solve_state(h);
}

ComplexField solve_complex_adjoint(const Mesh& m, const PhysicalCoefficients& coef,
                                   const ComplexField& u) {
    return ComplexTransmissionSystem(m, coef).solve_adjoint(u);
}

}  // namespace thermoshape
