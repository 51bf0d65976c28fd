#pragma once
// Finite-element solvers on the two-region tissue mesh.
//
// Two problems live here:
//  * the real transmission model used to generate synthetic skin data
//    (P2 by default, P1 optional), and
//  * the complex-valued reformulation used by the inversion: the measured
//    profile enters an imaginary Robin term on the skin edge, so the misfit
//    becomes the volume integral of the imaginary part instead of a boundary
//    functional.
//
// Weak form of the complex problem over the space vanishing on the base edge:
//   a(u, v) = int sigma grad u . grad conj(v) + k u conj(v)
//           + (alpha + i) int_skin u conj(v)
//   l(v)    = int Q conj(v) + alpha int_skin Ta conj(v) + i int_skin h conj(v)
// with u = Tb on the base.  The adjoint operator is the entrywise conjugate,
// so one LU factorization serves the state, the adjoint and the discrete
// material derivative.

#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "thermoshape/mesh.hpp"

namespace thermoshape {

struct PhysicalCoefficients {
    // The equation solved is  -div(sigma grad u) + k u = Q.  The bioheat
    // model behind it reads  -div(sigma grad u) + k (u - T_blood) = q_met,
    // so Q is the *effective* source q_met + k T_blood; with the defaults
    // below (q_met = 4200 / 42000, T_blood = 37) the inclusion is a net heat
    // source and the skin shows a warm spot above it.  Using the metabolic
    // rate alone as Q would flip the physics: k u would dominate everywhere
    // and the inclusion would read as a cold dip.
    double sigma1 = 0.5;      // tissue thermal conductivity
    double sigma0 = 0.75;     // inclusion thermal conductivity
    double k1 = 1998.1;       // tissue perfusion coefficient
    double k0 = 7992.4;       // inclusion perfusion coefficient
    double Q1 = 78129.7;      // tissue effective source: 4200 + k1 * 37
    double Q0 = 337718.8;     // inclusion effective source: 42000 + k0 * 37
    double Tb = 37.0;         // body-core temperature (base edge, Dirichlet)
    double Ta = 25.0;         // ambient temperature (skin edge, Robin)
    double alpha = 10.0;      // skin heat-transfer coefficient

    double sigma(int region) const { return region == 0 ? sigma0 : sigma1; }
    double k(int region) const { return region == 0 ? k0 : k1; }
    double Q(int region) const { return region == 0 ? Q0 : Q1; }
};

// Temperature trace along the skin edge, sampled at ascending arc positions
// (the x coordinate).  Evaluation is piecewise linear and clamped.
struct BoundaryProfile {
    std::vector<double> s;
    std::vector<double> value;

    double eval(double x) const;
    double max_abs() const;
};

// Nodal P1 complex field.
struct ComplexField {
    std::vector<double> re, im;
    explicit ComplexField(int n = 0) : re(n, 0.0), im(n, 0.0) {}
    int size() const { return static_cast<int>(re.size()); }
};

// L2 / H1 integrals of nodal fields (exact quadrature for P1 data).
double l2_norm(const Mesh& m, const std::vector<double>& f);
double h1_seminorm(const Mesh& m, const std::vector<double>& f);
double l2_norm(const Mesh& m, const ComplexField& f);
double h1_seminorm(const Mesh& m, const ComplexField& f);
double h1_norm(const Mesh& m, const ComplexField& f);

// The complex transmission operator on a fixed mesh: assembled once,
// factorized once, then solved for the state, the adjoint and any
// user-supplied right-hand side with zero base values.
class ComplexTransmissionSystem {
public:
    ComplexTransmissionSystem(const Mesh& mesh, const PhysicalCoefficients& coef);
    ~ComplexTransmissionSystem();
    ComplexTransmissionSystem(ComplexTransmissionSystem&&) noexcept;
    ComplexTransmissionSystem& operator=(ComplexTransmissionSystem&&) noexcept;

    // State solve with the measured skin profile h.  Checks the algebraic
    // residual of the assembled system (relative, <= 1e-10) and throws
    // NumericalError otherwise.
    ComplexField solve_state(const BoundaryProfile& h) const;

    // Adjoint solve: conjugated operator, volume source Im(u), zero on base.
    ComplexField solve_adjoint(const ComplexField& u) const;

    // Solve A x = rhs with x = 0 on the base edge (rhs given per vertex;
    // entries at base vertices are ignored).
    ComplexField solve_zero_dirichlet(const std::vector<std::complex<double>>& rhs) const;

    // Re{v^H A v} for an arbitrary complex vector supported on free nodes:
    // coercivity probe used by the tests.
    double coercivity_quotient(const std::vector<std::complex<double>>& v) const;

    const Mesh& mesh() const;
    const PhysicalCoefficients& coefficients() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Convenience wrappers.
ComplexField solve_complex_state(const Mesh& m, const PhysicalCoefficients& coef,
                                 const BoundaryProfile& h);
ComplexField solve_complex_adjoint(const Mesh& m, const PhysicalCoefficients& coef,
                                   const ComplexField& u);

// Optional data overrides for the real forward model; every hook defaults to
// the homogeneous-in-region physical data.  Used to verify convergence
// against manufactured solutions.
struct ForwardData {
    std::function<double(Vec2, int)> source;       // f(x, region)
    std::function<double(Vec2)> dirichlet;         // base temperature
    std::function<double(Vec2)> robin_ambient;     // skin ambient temperature
    std::function<double(Vec2)> lateral_flux;      // -sigma du/dn on lateral edges
};

// Real forward solve; degree is 1 or 2.  Returns the nodal vertex values and
// the skin trace sampled at skin vertex arc positions.
std::pair<std::vector<double>, BoundaryProfile> solve_forward_real(
    const Mesh& m, const PhysicalCoefficients& coef, int degree,
    const ForwardData* data = nullptr);

}  // namespace thermoshape
