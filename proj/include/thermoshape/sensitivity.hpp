#pragma once
// Mesh-sensitivity analysis of the complex state under nodal mesh motion.
//
// When the vertices move along a velocity field v (zero on the box boundary)
// the P1 state acquires a material derivative du that solves the *same*
// complex transmission system with a right-hand side built cell by cell from
// the edge matrices E = [x1-x0, x2-x0] and Edot = [v1-v0, v2-v0]:
//
//   a(du, psi) = sum_K int_K sigma grad u . (Edot E^-1 + E^-T Edot^T) grad psi
//              - sum_K int_K (sigma grad u . grad psi + k u psi - Q psi)
//                          * tr(Edot E^-1)
//
// (the coefficients are constant per region, so their gradients contribute
// nothing, and tr(Edot E^-1) is the discrete divergence of the velocity).
// One extra back-substitution on the existing factorization per field.
//
// The point of the sweeps: a W^{1,inf} velocity keeps |grad du| essentially
// mesh-independent, while rough nodal noise of fixed amplitude makes it grow
// like 1 / min_K a_K as the mesh is refined.  The Riesz blend c_b controls
// which of the two regimes the descent fields of the inverse loop live in
// once the data is noisy.

#include <cstdint>
#include <string>
#include <vector>

#include "thermoshape/fem.hpp"
#include "thermoshape/mesh.hpp"

namespace thermoshape {

// Nodal mesh velocity; `smooth` records how it was built (analytic sample
// vs. injected nodal noise).  Always zero on the box boundary vertices.
struct MeshVelocity {
    VectorField v;
    bool smooth = true;
};

// The analytic field used for the smooth branch, scaled to unit sup norm and
// vanishing on the box boundary:
//   v_x = sin(pi x / w) sin(pi y / h),  v_y = sin(2 pi x / w) sin(pi y / h).
Vec2 smooth_velocity_at(Vec2 p, double width, double height);

// Vertex samples of smooth_velocity_at (boundary vertices exactly zero).
MeshVelocity smooth_velocity(const Mesh& m);

// iid uniform [-1,1]^2 nodal vectors, scaled to unit sup norm (Euclidean per
// vertex), zero on the box boundary.  Deterministic in the seed.
MeshVelocity rough_velocity(const Mesh& m, std::uint64_t seed);

// Material derivative of the state u under the velocity v; reuses the
// system factorization (v must vanish on the box boundary, u must be the
// state solved on sys.mesh()).
ComplexField material_derivative(const ComplexTransmissionSystem& sys,
                                 const ComplexField& u, const VectorField& v);

// One finite-difference probe of the material derivative.
struct FdEntry {
    double t = 0.0;
    double h1_error = 0.0;  // || (u(t) o T_t - u)/t - du ||_H1, pulled back nodally
    bool inverted = false;  // the move at this t inverted a cell; no error computed
};

// Deform a copy of the mesh by t*v (fixed connectivity), re-solve, identify
// dofs nodally, form the difference quotient and compare against du in H1.
// t_list must be positive and strictly decreasing.
std::vector<FdEntry> fd_oracle(const Mesh& m, const PhysicalCoefficients& coef,
                               const BoundaryProfile& h, const VectorField& v,
                               const std::vector<double>& t_list);

struct SensitivityReport {
    int mesh_level = 0;       // 0 = input mesh, +1 per uniform refinement
    MeshStats stats;
    std::string field_kind;   // "smooth" | "rough"
    double grad_norm = 0.0;   // || grad du ||_L2
    std::vector<FdEntry> fd;  // one entry per requested t, decreasing
};

// The smooth/rough dichotomy over `levels` uniform refinements of `coarse`:
// per level and field kind, solve the state, the material derivative and the
// FD probes (t_list may be empty to skip them).  The rough draw uses
// rough_seed on every level.
std::vector<SensitivityReport> stability_sweep(
    const Mesh& coarse, const PhysicalCoefficients& coef,
    const BoundaryProfile& h, int levels, const std::vector<double>& t_list,
    std::uint64_t rough_seed);

// One row of the Riesz-blend stability table: descent field computed from a
// (possibly noise-corrupted) measurement on one mesh level, then probed as a
// mesh velocity.
struct CbEffectRow {
    int mesh_level = 0;
    double cb = 0.0;
    double delta = 0.0;            // relative noise amplitude on the data
    double theta_grad_norm = 0.0;  // || grad theta ||_L2 of the descent field
    double mat_deriv_norm = 0.0;   // || grad du ||_L2 under v = theta
};

// For each (delta, level, cb), in that row order: corrupt the exact profile
// (seeded per delta, shared across levels and cb so only the mesh and the
// blend vary), solve state + adjoint, assemble the shape gradient,
// Riesz-smooth it with cb and report the two norms.
std::vector<CbEffectRow> cb_effect_sweep(const Mesh& coarse,
                                         const PhysicalCoefficients& coef,
                                         const BoundaryProfile& exact_h,
                                         int levels,
                                         const std::vector<double>& cb_list,
                                         const std::vector<double>& delta_list,
                                         std::uint64_t noise_seed);

}  // namespace thermoshape
