// Velocity-field construction, the finite-difference oracle and the two
// empirical sweeps (mesh refinement dichotomy, Riesz-blend stability).

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "thermoshape/common.hpp"
#include "thermoshape/fem.hpp"
#include "thermoshape/mesh.hpp"
#include "thermoshape/sensitivity.hpp"
#include "thermoshape/shapeopt.hpp"

namespace thermoshape {

Vec2 smooth_velocity_at(Vec2 p, double width, double height) {
    const double pi = 3.14159265358979323846;
    const double sx = std::sin(pi * p.x / width);
    const double sy = std::sin(pi * p.y / height);
    return {sx * sy, std::sin(2.0 * pi * p.x / width) * sy};
}

MeshVelocity smooth_velocity(const Mesh& m) {
    MeshVelocity out;
    out.smooth = true;
    out.v = VectorField(m.num_vertices());
    const std::vector<char> on_box = m.boundary_vertex_mask();
    for (int i = 0; i < m.num_vertices(); ++i) {
        if (on_box[i]) continue;
        const Vec2 w = smooth_velocity_at(m.xy[i], m.width, m.height);
        out.v.x[i] = w.x;
        out.v.y[i] = w.y;
    }
    return out;
}

MeshVelocity rough_velocity(const Mesh& m, std::uint64_t seed) {
    MeshVelocity out;
    out.smooth = false;
    out.v = VectorField(m.num_vertices());
    const std::vector<char> on_box = m.boundary_vertex_mask();
    Rng rng(seed);
    double sup = 0.0;
    for (int i = 0; i < m.num_vertices(); ++i) {
        if (on_box[i]) continue;
        out.v.x[i] = rng.uniform(-1.0, 1.0);
        out.v.y[i] = rng.uniform(-1.0, 1.0);
        sup = std::max(sup, norm(out.v.at(i)));
    }
    if (sup > 0.0)
        for (int i = 0; i < m.num_vertices(); ++i) {
            out.v.x[i] /= sup;
            out.v.y[i] /= sup;
        }
    return out;
}

std::vector<FdEntry> fd_oracle(const Mesh& m, const PhysicalCoefficients& coef,
                               const BoundaryProfile& h, const VectorField& v,
                               const std::vector<double>& t_list) {
    for (std::size_t i = 0; i < t_list.size(); ++i) {
        if (!(t_list[i] > 0.0))
            throw ConfigError("fd_oracle: t values must be positive");
        if (i > 0 && !(t_list[i] < t_list[i - 1]))
            throw ConfigError("fd_oracle: t values must be strictly decreasing");
    }

    const ComplexTransmissionSystem sys(m, coef);
    const ComplexField u = sys.solve_state(h);
    const ComplexField du = material_derivative(sys, u, v);
    const int n = m.num_vertices();

    std::vector<FdEntry> out;
    out.reserve(t_list.size());
    for (const double t : t_list) {
        Mesh moved = m;
        const DeformOutcome oc = deform(moved, v, t);
        if (!oc.ok) {
            out.push_back({t, 0.0, true});
            continue;
        }
        // Same connectivity, same dof indices: the pullback by T_t is the
        // identity on coefficient vectors.
        const ComplexField ut = solve_complex_state(moved, coef, h);
        ComplexField diff(n);
        for (int i = 0; i < n; ++i) {
            diff.re[i] = (ut.re[i] - u.re[i]) / t - du.re[i];
            diff.im[i] = (ut.im[i] - u.im[i]) / t - du.im[i];
        }
        out.push_back({t, h1_norm(m, diff), false});
    }
    return out;
}

std::vector<SensitivityReport> stability_sweep(
    const Mesh& coarse, const PhysicalCoefficients& coef,
    const BoundaryProfile& h, int levels, const std::vector<double>& t_list,
    std::uint64_t rough_seed) {
    if (levels < 1) throw ConfigError("stability_sweep: levels must be >= 1");

    std::vector<SensitivityReport> out;
    Mesh m = coarse;
    for (int level = 0; level < levels; ++level) {
        if (level > 0) m = refine_uniform(m);
        const MeshStats stats = mesh_stats(m);
        const ComplexTransmissionSystem sys(m, coef);
        const ComplexField u = sys.solve_state(h);

        for (const bool smooth : {true, false}) {
            const MeshVelocity mv =
                smooth ? smooth_velocity(m) : rough_velocity(m, rough_seed);
            const ComplexField du = material_derivative(sys, u, mv.v);

            SensitivityReport rep;
            rep.mesh_level = level;
            rep.stats = stats;
            rep.field_kind = smooth ? "smooth" : "rough";
            rep.grad_norm = h1_seminorm(m, du);
            if (!t_list.empty()) rep.fd = fd_oracle(m, coef, h, mv.v, t_list);
            out.push_back(std::move(rep));
        }
    }
    return out;
}

namespace {

// delta-relative iid Gaussian corruption of the sampled profile (the same
// model the data generator uses, kept local to avoid a module cycle).
BoundaryProfile corrupt(const BoundaryProfile& exact, double delta, Rng& rng) {
    BoundaryProfile out = exact;
    if (delta <= 0.0) return out;
    const double scale = delta * exact.max_abs();
    for (double& v : out.value) v += scale * rng.normal();
    return out;
}

}  // namespace

std::vector<CbEffectRow> cb_effect_sweep(const Mesh& coarse,
                                         const PhysicalCoefficients& coef,
                                         const BoundaryProfile& exact_h,
                                         int levels,
                                         const std::vector<double>& cb_list,
                                         const std::vector<double>& delta_list,
                                         std::uint64_t noise_seed) {
    if (levels < 1) throw ConfigError("cb_effect_sweep: levels must be >= 1");
    for (const double cb : cb_list)
        if (!(cb > 0.0 && cb <= 1.0))
            throw ConfigError("cb_effect_sweep: cb must lie in (0, 1]");
    for (const double d : delta_list)
        if (d < 0.0) throw ConfigError("cb_effect_sweep: delta must be >= 0");

    // Build the mesh family and factorize each level once; the operator does
    // not depend on the data or the blend.
    std::vector<Mesh> family;
    family.reserve(levels);
    family.push_back(coarse);
    for (int level = 1; level < levels; ++level)
        family.push_back(refine_uniform(family.back()));
    std::vector<ComplexTransmissionSystem> systems;
    systems.reserve(levels);
    for (int level = 0; level < levels; ++level)
        systems.emplace_back(family[level], coef);

    std::vector<CbEffectRow> out;
    for (std::size_t di = 0; di < delta_list.size(); ++di) {
        // One corrupted profile per delta, shared across levels and blends,
        // so rows differ only in the mesh and cb.
        Rng rng(noise_seed + di);
        const BoundaryProfile noisy = corrupt(exact_h, delta_list[di], rng);

        for (int level = 0; level < levels; ++level) {
            const Mesh& m = family[level];
            const ComplexTransmissionSystem& sys = systems[level];
            const ComplexField u = sys.solve_state(noisy);
            const ComplexField p = sys.solve_adjoint(u);
            const VectorField g = shape_gradient(m, coef, u, p);

            for (const double cb : cb_list) {
                const DescentField dsc = riesz_descent_field(m, g, cb);
                const ComplexField du = material_derivative(sys, u, dsc.theta);

                CbEffectRow row;
                row.mesh_level = level;
                row.cb = cb;
                row.delta = delta_list[di];
                row.theta_grad_norm = std::hypot(h1_seminorm(m, dsc.theta.x),
                                                 h1_seminorm(m, dsc.theta.y));
                row.mat_deriv_norm = h1_seminorm(m, du);
                out.push_back(row);
            }
        }
    }
    return out;
}

}  // namespace thermoshape
