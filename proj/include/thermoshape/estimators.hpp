#pragma once
// Residual a-posteriori error indicators for the complex state (eta_K), the
// adjoint (mu_K) and the objective (xi_K), with Doerfler cell marking.
//
// Per cell:  eta_K^2 = h_K^2 int_K |R_K|^2 + sum_{edges} h_e int_e |J_e|^2
// with the volume residual R_K = Q - k u  (piecewise-constant sigma kills
// div(sigma grad u) cellwise for P1) and the edge residual J_e given by:
//   skin     -sigma du/dn - alpha (u - Ta) - i (u - h)
//   lateral  -sigma du/dn
//   interior -1/2 [sigma du/dn]          (two-sided jump, one fixed normal;
//                                         interface edges differ only in the
//                                         per-side sigma)
//   base     0                           (Dirichlet edge)
// The adjoint set swaps (u, source) -> (p, Im u) and the skin weight
// (alpha + i) -> (alpha - i), the conjugate operator's Robin coefficient.
// Moduli are complex throughout.  Edge integrals use the same 2-point Gauss
// rule as the system assembly, so the Galerkin gap checks below cancel to
// machine precision.
//
// The objective indicator combines the two:
//   xi_K = (kappa/2 eta_K^2 + 1/(2 kappa) mu_K^2)^{1/2},
//   kappa = max eta_K / max mu_K,
// which balances the two families exactly:
//   max_K (1/(2 kappa)) eta_K^2 == max_K (kappa/2) mu_K^2.
//
// Indicators are reported, not wired into the descent loop; remeshing on a
// fixed cadence is already sufficient for the reconstruction.

#include <vector>

#include "thermoshape/fem.hpp"
#include "thermoshape/mesh.hpp"

namespace thermoshape {

// State indicators eta_K, one per cell.
std::vector<double> state_indicators(const Mesh& m,
                                     const PhysicalCoefficients& coef,
                                     const ComplexField& u,
                                     const BoundaryProfile& h);

// Adjoint indicators mu_K; u supplies the volume source Im(u).
std::vector<double> adjoint_indicators(const Mesh& m,
                                       const PhysicalCoefficients& coef,
                                       const ComplexField& p,
                                       const ComplexField& u);

struct ObjectiveIndicators {
    std::vector<double> xi;
    double kappa = 0.0;
    bool kappa_defined = false;  // false when all mu vanish; xi == eta then
};
ObjectiveIndicators objective_indicators(const std::vector<double>& eta,
                                         const std::vector<double>& mu);

// Everything at once, plus the root-sum-square globals.
struct IndicatorSet {
    std::vector<double> eta, mu, xi;
    std::vector<char> touches_interface;  // per cell
    double kappa = 0.0;
    bool kappa_defined = false;
    double eta_global = 0.0, mu_global = 0.0, xi_global = 0.0;
};
IndicatorSet compute_indicators(const Mesh& m, const PhysicalCoefficients& coef,
                                const ComplexField& u, const ComplexField& p,
                                const BoundaryProfile& h);

// Doerfler marking: the smallest set of cells (by descending xi, ties by
// ascending index) whose xi^2 sum reaches fraction * sum of all xi^2.
// Returns sorted cell indices.  fraction must lie in (0, 1].
std::vector<int> mark_cells(const std::vector<double>& xi, double fraction);

// Galerkin self-checks of the residual decomposition: the functional
//   Res(phi) = sum_K int_K R_K phi + sum_K sum_{e in dK} int_e J_e phi
// re-assembled against every free nodal basis function.  Both must vanish to
// roundoff when the signs, the interior 1/2 and the normals are right,
// because the state/adjoint solves make the same functional zero by
// construction.  Returns max_i |Res(phi_i)|.
double residual_orthogonality_gap(const Mesh& m, const PhysicalCoefficients& coef,
                                  const ComplexField& u, const BoundaryProfile& h);
double adjoint_residual_orthogonality_gap(const Mesh& m,
                                          const PhysicalCoefficients& coef,
                                          const ComplexField& p,
                                          const ComplexField& u);

}  // namespace thermoshape
