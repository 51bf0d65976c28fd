// Material derivative of the state under mesh motion, and the smooth/rough
// stability sweeps.
#include <cmath>
#include <vector>

#include "doctest.h"
#include "thermoshape/common.hpp"
#include "thermoshape/datagen.hpp"
#include "thermoshape/fem.hpp"
#include "thermoshape/mesh.hpp"
#include "thermoshape/sensitivity.hpp"

using namespace thermoshape;

namespace {

struct SensFixture {
    ExperimentSpec spec;
    BoundaryProfile h;
    Mesh m;

    SensFixture()
        : spec(builtin_experiment("test1_shallow_circle")),
          h(exact_measurement(spec)),
          m(build_rect_mesh(spec.width, spec.height, spec.coarse_h,
                            spec.exact_inclusions)) {}
};

const SensFixture& fix() {
    static SensFixture f;
    return f;
}

}  // namespace

TEST_CASE("smooth_velocity: nodal samples of the analytic field") {
    const Mesh& m = fix().m;
    MeshVelocity mv = smooth_velocity(m);
    CHECK(mv.smooth);
    auto on_box = m.boundary_vertex_mask();
    double sup = 0.0;
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (on_box[v]) {
            CHECK(mv.v.x[v] == 0.0);
            CHECK(mv.v.y[v] == 0.0);
        } else {
            const Vec2 a = smooth_velocity_at(m.xy[v], m.width, m.height);
            CHECK(mv.v.x[v] == doctest::Approx(a.x).epsilon(1e-14));
            CHECK(mv.v.y[v] == doctest::Approx(a.y).epsilon(1e-14));
        }
        sup = std::max(sup, std::hypot(mv.v.x[v], mv.v.y[v]));
    }
    CHECK(sup <= 1.0 + 1e-12);
    CHECK(sup > 0.5);  // scaled to unit sup norm up to sampling
}

TEST_CASE("rough_velocity: seeded, unit sup, admissible") {
    const Mesh& m = fix().m;
    MeshVelocity r1 = rough_velocity(m, 99);
    MeshVelocity r2 = rough_velocity(m, 99);
    MeshVelocity r3 = rough_velocity(m, 100);
    CHECK_FALSE(r1.smooth);
    CHECK(r1.v.x == r2.v.x);
    CHECK(r1.v.y == r2.v.y);
    CHECK(r1.v.x != r3.v.x);

    auto on_box = m.boundary_vertex_mask();
    double sup = 0.0;
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (on_box[v]) {
            CHECK(r1.v.x[v] == 0.0);
            CHECK(r1.v.y[v] == 0.0);
        }
        sup = std::max(sup, std::hypot(r1.v.x[v], r1.v.y[v]));
    }
    CHECK(sup == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("edge-velocity matrix obeys the mesh-smoothness bound") {
    // For a W^{1,inf} velocity, each column of Edot = [v1-v0, v2-v0] is a
    // mean-value increment, so ||Edot||_F <= sqrt(2) h_K sup ||grad v||_F.
    const Mesh& m = fix().m;
    MeshVelocity mv = smooth_velocity(m);
    const double w = m.width, hgt = m.height;
    const double G = std::sqrt(std::pow(M_PI / w, 2) + std::pow(M_PI / hgt, 2) +
                               std::pow(2 * M_PI / w, 2) + std::pow(M_PI / hgt, 2));
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.tri[c];
        const CellGeometry g = cell_geometry(m, c);
        const double e11 = mv.v.x[t[1]] - mv.v.x[t[0]];
        const double e21 = mv.v.y[t[1]] - mv.v.y[t[0]];
        const double e12 = mv.v.x[t[2]] - mv.v.x[t[0]];
        const double e22 = mv.v.y[t[2]] - mv.v.y[t[0]];
        const double fro = std::sqrt(e11 * e11 + e21 * e21 + e12 * e12 + e22 * e22);
        CHECK(fro <= std::sqrt(2.0) * g.h * G * (1.0 + 1e-12));
    }
}

TEST_CASE("material derivative: zero velocity, linearity") {
    const SensFixture& f = fix();
    ComplexTransmissionSystem sys(f.m, f.spec.coef);
    ComplexField u = sys.solve_state(f.h);

    VectorField zero(f.m.num_vertices());
    ComplexField d0 = material_derivative(sys, u, zero);
    for (int v = 0; v < f.m.num_vertices(); ++v) {
        CHECK(d0.re[v] == 0.0);
        CHECK(d0.im[v] == 0.0);
    }

    MeshVelocity vs = smooth_velocity(f.m);
    MeshVelocity vr = rough_velocity(f.m, 7);
    ComplexField da = material_derivative(sys, u, vs.v);
    ComplexField db = material_derivative(sys, u, vr.v);

    const double ca = 0.75, cbb = -1.5;
    VectorField combo(f.m.num_vertices());
    for (int v = 0; v < f.m.num_vertices(); ++v) {
        combo.x[v] = ca * vs.v.x[v] + cbb * vr.v.x[v];
        combo.y[v] = ca * vs.v.y[v] + cbb * vr.v.y[v];
    }
    ComplexField dc = material_derivative(sys, u, combo);

    double num = 0.0, den = 0.0;
    for (int v = 0; v < f.m.num_vertices(); ++v) {
        const double er = dc.re[v] - (ca * da.re[v] + cbb * db.re[v]);
        const double ei = dc.im[v] - (ca * da.im[v] + cbb * db.im[v]);
        num = std::max(num, std::max(std::fabs(er), std::fabs(ei)));
        den = std::max(den, std::max(std::fabs(dc.re[v]), std::fabs(dc.im[v])));
    }
    CHECK(num <= 1e-10 * den);
}

TEST_CASE("fd_oracle: validation, inversion flag, first-order convergence") {
    const SensFixture& f = fix();
    MeshVelocity vs = smooth_velocity(f.m);

    CHECK_THROWS_AS(fd_oracle(f.m, f.spec.coef, f.h, vs.v, {1e-4, 1e-4}),
                    ConfigError);
    CHECK_THROWS_AS(fd_oracle(f.m, f.spec.coef, f.h, vs.v, {1e-5, 1e-4}),
                    ConfigError);
    CHECK_THROWS_AS(fd_oracle(f.m, f.spec.coef, f.h, vs.v, {1e-4, 0.0}),
                    ConfigError);

    // A one-meter step certainly inverts cells of a 9 cm sample; the small
    // steps behave and the error is O(t).
    auto entries = fd_oracle(f.m, f.spec.coef, f.h, vs.v, {1.0, 1e-3, 5e-4});
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].inverted);
    CHECK_FALSE(entries[1].inverted);
    CHECK_FALSE(entries[2].inverted);
    CHECK(entries[1].h1_error > 0.0);
    const double order = std::log2(entries[1].h1_error / entries[2].h1_error);
    CHECK(order >= 0.9);
    CHECK(order <= 1.1);
}

TEST_CASE("stability sweep: smooth fields stay bounded, rough fields blow up") {
    const SensFixture& f = fix();
    auto rows = stability_sweep(f.m, f.spec.coef, f.h, 2, {}, 123);
    REQUIRE(rows.size() == 4);  // 2 levels x {smooth, rough}

    double smooth_norm[2] = {0, 0}, rough_norm[2] = {0, 0};
    for (const auto& r : rows) {
        REQUIRE(r.mesh_level >= 0);
        REQUIRE(r.mesh_level < 2);
        CHECK(r.grad_norm > 0.0);
        CHECK(r.fd.empty());
        if (r.field_kind == "smooth")
            smooth_norm[r.mesh_level] = r.grad_norm;
        else if (r.field_kind == "rough")
            rough_norm[r.mesh_level] = r.grad_norm;
        else
            FAIL(("unknown field kind: " + r.field_kind));
    }
    // Refinement halves the mesh size between the two levels.
    CHECK(rows[2].stats.h_max == doctest::Approx(0.5 * rows[0].stats.h_max));

    // Smooth: essentially level-independent.  Rough: grows like 1/min a_K.
    const double spread = std::max(smooth_norm[0], smooth_norm[1]) /
                          std::min(smooth_norm[0], smooth_norm[1]);
    CHECK(spread <= 1.5);
    CHECK(rough_norm[1] > 1.5 * rough_norm[0]);
}

TEST_CASE("cb sweep: blend damps the descent field, noise sets its floor") {
    const SensFixture& f = fix();
    auto rows = cb_effect_sweep(f.m, f.spec.coef, f.h, 3, {1e-5, 0.5},
                                {0.0, 0.05}, 2024);
    REQUIRE(rows.size() == 12);  // delta x level x cb

    auto find = [&](double delta, int level, double cb) -> const CbEffectRow& {
        for (const auto& r : rows)
            if (r.delta == delta && r.mesh_level == level && r.cb == cb) return r;
        FAIL("missing row");
        return rows[0];
    };

    for (double delta : {0.0, 0.05})
        for (int level : {0, 1, 2}) {
            // Small cb lets the raw (rough) gradient through; cb = 0.5 smooths
            // it by orders of magnitude.
            const auto& sharp = find(delta, level, 1e-5);
            const auto& smooth = find(delta, level, 0.5);
            CHECK(sharp.theta_grad_norm > 100.0 * smooth.theta_grad_norm);
            CHECK(sharp.mat_deriv_norm > smooth.mat_deriv_norm);
        }

    // Noiseless data: the smoothed descent field keeps shrinking under
    // refinement (the discretization error it chases vanishes).
    CHECK(find(0.0, 2, 0.5).theta_grad_norm <
          0.5 * find(0.0, 1, 0.5).theta_grad_norm);
    // Noisy data: the field stalls at the noise floor instead.
    CHECK(find(0.05, 2, 0.5).theta_grad_norm >
          0.6 * find(0.05, 1, 0.5).theta_grad_norm);
    // And noise strictly raises the floor on the finest level.
    CHECK(find(0.05, 2, 0.5).theta_grad_norm > 2.0 * find(0.0, 2, 0.5).theta_grad_norm);
}
