// Objective, shape gradient, balancing rule, Riesz descent and the
// reconstruction driver.
#include <cmath>
#include <vector>

#include "doctest.h"
#include "thermoshape/common.hpp"
#include "thermoshape/datagen.hpp"
#include "thermoshape/fem.hpp"
#include "thermoshape/mesh.hpp"
#include "thermoshape/shapeopt.hpp"

using namespace thermoshape;

namespace {

constexpr double kW = 0.09, kH = 0.03;

// Shared fixture: fine-mesh P2 data for the exact circle, plus a displaced
// coarse guess mesh with its state/adjoint/gradient.  Built once.
struct GradFixture {
    BoundaryProfile prof;
    Mesh m;
    ComplexField u, p;
    VectorField g;
    double J0 = 0.0;
    PhysicalCoefficients c;

    GradFixture() {
        Mesh fine = build_rect_mesh(
            kW, kH, 0.00075, {circle_polygon({0.045, 0.02}, 0.005, 0.00075)});
        prof = solve_forward_real(fine, c, 2).second;
        m = build_rect_mesh(kW, kH, 0.002,
                            {circle_polygon({0.040, 0.015}, 0.005, 0.002)});
        ComplexTransmissionSystem sys(m, c);
        u = sys.solve_state(prof);
        p = sys.solve_adjoint(u);
        g = shape_gradient(m, c, u, p);
        J0 = evaluate_objective(m, u, prof, 0.0).J;
    }
};

const GradFixture& fixture() {
    static GradFixture f;
    return f;
}

double eval_J(const Mesh& m, const PhysicalCoefficients& c,
              const BoundaryProfile& h) {
    ComplexField u = solve_complex_state(m, c, h);
    return evaluate_objective(m, u, h, 0.0).J;
}

// Random smooth admissible deformation field (vanishes on the box boundary).
VectorField random_field(const Mesh& m, Rng& rng, double amp = 0.01) {
    const double a1 = rng.uniform(-1, 1), a2 = rng.uniform(-1, 1);
    const double b1 = rng.uniform(-1, 1), b2 = rng.uniform(-1, 1);
    VectorField th(m.num_vertices());
    auto on_box = m.boundary_vertex_mask();
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (on_box[v]) continue;
        const double x = m.xy[v].x, y = m.xy[v].y;
        const double sx = std::sin(M_PI * x / kW), sy = std::sin(M_PI * y / kH);
        const double s2x = std::sin(2 * M_PI * x / kW);
        const double s2y = std::sin(2 * M_PI * y / kH);
        th.x[v] = amp * (a1 * sx * sy + a2 * s2x * sy);
        th.y[v] = amp * (b1 * sx * sy + b2 * sx * s2y);
    }
    return th;
}

}  // namespace

TEST_CASE("evaluate_objective: constant-field oracles") {
    Mesh m = build_rect_mesh(kW, kH, 0.003,
                             {circle_polygon({0.045, 0.02}, 0.005, 0.003)});
    PhysicalCoefficients c;
    auto [ur, prof] = solve_forward_real(m, c, 1);

    // J: uniform imaginary part c0 integrates to 1/2 c0^2 |Omega| exactly.
    ComplexField u(m.num_vertices());
    const double c0 = 0.3;
    for (int v = 0; v < m.num_vertices(); ++v) {
        u.re[v] = ur[v];
        u.im[v] = c0;
    }
    ObjectiveReport rep = evaluate_objective(m, u, prof, 0.0);
    CHECK(rep.J == doctest::Approx(0.5 * c0 * c0 * kW * kH).epsilon(1e-12));

    // J_LS: the real trace matches the measurement exactly (same piecewise
    // linear function on the same breakpoints).
    CHECK(rep.J_ls <= 1e-18);

    // Shifting the real part by d makes J_LS = 1/2 d^2 * skin length.
    const double d = 0.25;
    for (int v = 0; v < m.num_vertices(); ++v) u.re[v] += d;
    ObjectiveReport rep2 = evaluate_objective(m, u, prof, 0.0);
    CHECK(rep2.J_ls == doctest::Approx(0.5 * d * d * kW).epsilon(1e-12));

    // Volume equals the loop polygon area; penalized/combined compose.
    std::vector<Vec2> loop;
    for (int v : m.loops[0]) loop.push_back(m.xy[v]);
    CHECK(rep.vol == doctest::Approx(polygon_area(loop)).epsilon(1e-12));
    CHECK(inclusion_volume(m) == doctest::Approx(rep.vol));
    ObjectiveReport rep3 = evaluate_objective(m, u, prof, 2.5);
    CHECK(rep3.rho == 2.5);
    CHECK(rep3.penalized() == doctest::Approx(rep3.J + 2.5 * rep3.vol));
    CHECK(rep3.combined() == doctest::Approx(rep3.J + rep3.J_ls));
}

TEST_CASE("balance_rho: bitwise quotient identity and validation") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double J = std::pow(10.0, rng.uniform(-12.0, -6.0));
        const double vol = std::pow(10.0, rng.uniform(-6.0, -3.0));
        const double beta = 1.0 + rng.uniform(0.1, 3.0);
        const double rho = balance_rho(beta, J, vol);
        // The rule *is* the quotient; verified bitwise.
        CHECK(rho == (beta - 1.0) * J / vol);
        CHECK(rho >= 0.0);
    }
    CHECK(balance_rho(2.0, 0.0, 1e-4) == 0.0);
    CHECK_THROWS_AS(balance_rho(2.0, 1e-9, 0.0), ConfigError);
    CHECK_THROWS_AS(balance_rho(2.0, 1e-9, -1.0), ConfigError);
    CHECK_THROWS_AS(balance_rho(1.0, 1e-9, 1e-4), ConfigError);
}

TEST_CASE("apply_gradient and accumulate") {
    VectorField g(2), th(2);
    g.x = {1.0, -2.0};
    g.y = {0.5, 3.0};
    th.x = {2.0, 1.0};
    th.y = {4.0, -1.0};
    CHECK(apply_gradient(g, th) == doctest::Approx(1 * 2 + (-2) * 1 + 0.5 * 4 + 3 * (-1)));

    VectorField sum = g;
    accumulate(sum, th, 0.5);
    CHECK(sum.x[0] == doctest::Approx(2.0));
    CHECK(sum.y[1] == doctest::Approx(2.5));

    VectorField wrong(3);
    CHECK_THROWS_AS(apply_gradient(g, wrong), ConfigError);
    CHECK_THROWS_AS(accumulate(sum, wrong, 1.0), ConfigError);
}

TEST_CASE("shape gradient matches central finite differences") {
    const GradFixture& f = fixture();
    Rng rng(42);
    VectorField th = random_field(f.m, rng);
    const double dJ = apply_gradient(f.g, th);
    REQUIRE(std::fabs(dJ) > 1e-12);

    const double t = 1e-6;
    Mesh mp = f.m, mm = f.m;
    VectorField neg(f.m.num_vertices());
    for (int v = 0; v < f.m.num_vertices(); ++v) {
        neg.x[v] = -th.x[v];
        neg.y[v] = -th.y[v];
    }
    REQUIRE(deform(mp, th, t).ok);
    REQUIRE(deform(mm, neg, t).ok);
    const double fd = (eval_J(mp, f.c, f.prof) - eval_J(mm, f.c, f.prof)) / (2 * t);
    CHECK(std::fabs(dJ - fd) / std::fabs(fd) <= 1e-5);
}

TEST_CASE("volume gradient matches central finite differences") {
    const GradFixture& f = fixture();
    Rng rng(43);
    VectorField th = random_field(f.m, rng);
    VectorField gv = volume_gradient(f.m);
    const double dvol = apply_gradient(gv, th);

    const double t = 1e-6;
    Mesh mp = f.m, mm = f.m;
    VectorField neg(f.m.num_vertices());
    for (int v = 0; v < f.m.num_vertices(); ++v) {
        neg.x[v] = -th.x[v];
        neg.y[v] = -th.y[v];
    }
    REQUIRE(deform(mp, th, t).ok);
    REQUIRE(deform(mm, neg, t).ok);
    const double fd = (inclusion_volume(mp) - inclusion_volume(mm)) / (2 * t);
    CHECK(std::fabs(dvol - fd) / std::fabs(fd) <= 1e-8);
}

TEST_CASE("Riesz descent: identity, symmetry, descent direction") {
    const GradFixture& f = fixture();
    const double cb = 0.5;
    DescentField d = riesz_descent_field(f.m, f.g, cb);
    CHECK(d.hnorm_sq >= 0.0);

    // b(theta, theta) == -dJ[theta] (the Riesz property) to 1e-10 relative.
    const double bb = hform_inner(f.m, d.theta, d.theta, cb);
    CHECK(std::fabs(bb - d.hnorm_sq) <= 1e-10 * d.hnorm_sq);
    const double dJ = apply_gradient(f.g, d.theta);
    CHECK(std::fabs(bb + dJ) <= 1e-10 * bb);
    CHECK(dJ < 0.0);  // genuine descent direction

    // hform_inner is symmetric and bilinear.
    Rng rng(9);
    VectorField a = random_field(f.m, rng), b = random_field(f.m, rng);
    const double ab = hform_inner(f.m, a, b, cb);
    const double ba = hform_inner(f.m, b, a, cb);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    VectorField a2 = a;
    accumulate(a2, a, 1.0);  // a2 = 2a
    CHECK(hform_inner(f.m, a2, b, cb) == doctest::Approx(2.0 * ab).epsilon(1e-12));

    CHECK_THROWS_AS(riesz_descent_field(f.m, f.g, 0.0), ConfigError);
    CHECK_THROWS_AS(riesz_descent_field(f.m, f.g, 1.5), ConfigError);
}

TEST_CASE("init_guess_from_profile: peak detection and fallbacks") {
    // Synthetic symmetric bump peaked at x = 0.045.
    BoundaryProfile h;
    const int n = 101;
    for (int i = 0; i < n; ++i) {
        const double x = kW * i / (n - 1);
        h.s.push_back(x);
        h.value.push_back(35.0 + std::exp(-std::pow((x - 0.045) / 0.01, 2)));
    }
    InitialGuess g = init_guess_from_profile(h, kW, kH, 0.02, 0.005, 0.002);
    CHECK_FALSE(g.fallback);
    CHECK(std::fabs(g.peak_x - 0.045) <= 0.001);
    CHECK(polygon_area(g.polygon) > 0.0);
    // The circle sits at depth 0.02 below the skin.
    double cy = 0.0;
    for (const auto& p : g.polygon) cy += p.y;
    cy /= static_cast<double>(g.polygon.size());
    CHECK(cy == doctest::Approx(kH - 0.02).epsilon(1e-6));

    // Constant profile: flagged fallback at the skin midpoint.
    BoundaryProfile flat;
    for (int i = 0; i < 20; ++i) {
        flat.s.push_back(kW * i / 19.0);
        flat.value.push_back(36.0);
    }
    InitialGuess gf = init_guess_from_profile(flat, kW, kH, 0.02, 0.005, 0.002);
    CHECK(gf.fallback);
    CHECK(gf.peak_x == doctest::Approx(0.045));

    // Degree-11 fit needs at least 12 samples.
    BoundaryProfile tiny;
    for (int i = 0; i < 11; ++i) {
        tiny.s.push_back(kW * i / 10.0);
        tiny.value.push_back(36.0 + i);
    }
    CHECK_THROWS_AS(init_guess_from_profile(tiny, kW, kH, 0.02, 0.005, 0.002),
                    ConfigError);
    CHECK_THROWS_AS(init_guess_from_profile(h, kW, kH, -0.1, 0.005, 0.002),
                    ConfigError);
}

TEST_CASE("reconstruct: short run behaves and reproduces bitwise") {
    ExperimentSpec spec = builtin_experiment("test1_shallow_circle");
    BoundaryProfile h = generate_measurement(spec);
    InitialGuess guess = init_guess_from_profile(h, spec.width, spec.height,
                                                 spec.guess_depth, spec.guess_r0,
                                                 spec.coarse_h);
    Mesh m0 = build_rect_mesh(spec.width, spec.height, spec.coarse_h,
                              {guess.polygon});
    OptConfig cfg;
    cfg.s = spec.step_scale;
    cfg.kmax = 3;

    ReconstructionResult r1 = reconstruct(m0, spec.coef, h, cfg);
    CHECK(r1.history.size() == 3);
    CHECK(r1.termination == "K_max");
    for (size_t i = 1; i < r1.history.size(); ++i)
        CHECK(r1.history[i].J < r1.history[i - 1].J);
    for (const auto& rec : r1.history) {
        CHECK(rec.grad_norm > 0.0);
        CHECK(rec.vol > 0.0);
        CHECK(rec.rho == 0.0);  // balancing off
    }
    CHECK_NOTHROW(check_mesh(r1.mesh));

    ReconstructionResult r2 = reconstruct(m0, spec.coef, h, cfg);
    REQUIRE(r2.history.size() == r1.history.size());
    for (size_t i = 0; i < r1.history.size(); ++i) {
        CHECK(r1.history[i].J == r2.history[i].J);
        CHECK(r1.history[i].J_ls == r2.history[i].J_ls);
        CHECK(r1.history[i].vol == r2.history[i].vol);
        CHECK(r1.history[i].t == r2.history[i].t);
        CHECK(r1.history[i].grad_norm == r2.history[i].grad_norm);
    }

    OptConfig bad = cfg;
    bad.balancing = true;
    bad.beta = 1.0;
    CHECK_THROWS_AS(reconstruct(m0, spec.coef, h, bad), ConfigError);
}
