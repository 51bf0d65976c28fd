// Mesh construction, refinement, deformation and polygon utilities.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "thermoshape/common.hpp"
#include "thermoshape/mesh.hpp"

using namespace thermoshape;

namespace {

Mesh test_mesh(double target_h = 0.003) {
    return build_rect_mesh(0.09, 0.03, target_h,
                           {circle_polygon({0.045, 0.02}, 0.005, target_h)});
}

double total_area(const Mesh& m) {
    double a = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) a += cell_geometry(m, c).area;
    return a;
}

}  // namespace

TEST_CASE("build_rect_mesh: sound, conforming, correct regions") {
    Mesh m = test_mesh();
    CHECK_NOTHROW(check_mesh(m));
    CHECK(m.num_cells() > 100);
    CHECK(m.loops.size() == 1);
    CHECK(m.width == doctest::Approx(0.09));
    CHECK(m.height == doctest::Approx(0.03));

    // Total cell area tiles the rectangle exactly.
    CHECK(total_area(m) == doctest::Approx(0.09 * 0.03).epsilon(1e-12));

    // Region-0 cells tile the inclusion polygon exactly (loop segments are
    // mesh edges, so no cell straddles the interface).
    std::vector<Vec2> loop;
    for (int v : m.loops[0]) loop.push_back(m.xy[v]);
    double a0 = 0.0;
    for (int c = 0; c < m.num_cells(); ++c)
        if (m.region[c] == 0) a0 += cell_geometry(m, c).area;
    CHECK(a0 == doctest::Approx(polygon_area(loop)).epsilon(1e-12));

    // Every cell is CCW.
    for (int c = 0; c < m.num_cells(); ++c) CHECK(cell_geometry(m, c).det > 0.0);

    // Boundary tags: skin at y = height, base at y = 0, lateral at x = 0 / w.
    for (const auto& be : m.bedge) {
        const Vec2 p = m.xy[be[0]], q = m.xy[be[1]];
        if (be[2] == kTagSkin) {
            CHECK(p.y == doctest::Approx(0.03));
            CHECK(q.y == doctest::Approx(0.03));
        } else if (be[2] == kTagBase) {
            CHECK(p.y == doctest::Approx(0.0));
            CHECK(q.y == doctest::Approx(0.0));
        } else {
            CHECK(std::min(std::fabs(p.x), std::fabs(p.x - 0.09)) ==
                  doctest::Approx(0.0));
        }
    }
}

TEST_CASE("build_rect_mesh: rejects bad loops") {
    // Violates the clearance band at the top.
    CHECK_THROWS_AS(build_rect_mesh(0.09, 0.03, 0.003,
                                    {circle_polygon({0.045, 0.029}, 0.005, 0.003)}),
                    ConfigError);
    // Degenerate loop.
    CHECK_THROWS_AS(build_rect_mesh(0.09, 0.03, 0.003,
                                    {{{0.04, 0.02}, {0.05, 0.02}}}),
                    ConfigError);
}

TEST_CASE("cell_geometry identities") {
    const Vec2 p0{0.1, 0.2}, p1{0.4, 0.25}, p2{0.2, 0.6};
    CellGeometry g = cell_geometry(p0, p1, p2);
    CHECK(g.e[0][0] == doctest::Approx(p1.x - p0.x));
    CHECK(g.e[1][0] == doctest::Approx(p1.y - p0.y));
    CHECK(g.e[0][1] == doctest::Approx(p2.x - p0.x));
    CHECK(g.e[1][1] == doctest::Approx(p2.y - p0.y));
    CHECK(g.det == doctest::Approx(cross(p1 - p0, p2 - p0)));
    CHECK(g.area == doctest::Approx(0.5 * g.det));

    // E * E^{-1} = I.
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int l = 0; l < 2; ++l) s += g.e[i][l] * g.inv_e[l][j];
            CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }

    // Barycentric gradients: sum to zero, and grad lambda_i . (p_j - p_i)
    // equals -1 for j != i (lambda_i drops from 1 to 0 along that edge).
    Vec2 s = g.grad_lambda[0] + g.grad_lambda[1] + g.grad_lambda[2];
    CHECK(norm(s) == doctest::Approx(0.0).epsilon(1e-10));
    const Vec2 p[3] = {p0, p1, p2};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double d = dot(g.grad_lambda[i], p[j] - p[i]);
            CHECK(d == doctest::Approx(i == j ? 0.0 : -1.0).epsilon(1e-10));
        }

    // h = longest side, a = smallest vertex height = 2*area / longest side.
    const double sides[3] = {norm(p1 - p0), norm(p2 - p1), norm(p0 - p2)};
    CHECK(g.h == doctest::Approx(std::max({sides[0], sides[1], sides[2]})));
    CHECK(g.a == doctest::Approx(2.0 * g.area / g.h));
}

TEST_CASE("refine_uniform: contract and measures") {
    Mesh m = test_mesh();
    Mesh f = refine_uniform(m);
    CHECK_NOTHROW(check_mesh(f));
    CHECK(f.num_cells() == 4 * m.num_cells());

    // Parent vertices keep their indices and coordinates.
    for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(f.xy[v].x == m.xy[v].x);
        CHECK(f.xy[v].y == m.xy[v].y);
    }

    // Child layout: {t0,m01,m20}, {t1,m12,m01}, {t2,m20,m12}, {m01,m12,m20};
    // midpoints are recoverable from the first two children.
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.tri[c];
        CHECK(f.tri[4 * c][0] == t[0]);
        CHECK(f.tri[4 * c + 1][0] == t[1]);
        CHECK(f.tri[4 * c + 2][0] == t[2]);
        const int m01 = f.tri[4 * c][1];
        const int m20 = f.tri[4 * c][2];
        const int m12 = f.tri[4 * c + 1][1];
        CHECK(f.xy[m01].x == doctest::Approx(0.5 * (m.xy[t[0]].x + m.xy[t[1]].x)));
        CHECK(f.xy[m01].y == doctest::Approx(0.5 * (m.xy[t[0]].y + m.xy[t[1]].y)));
        CHECK(f.xy[m12].x == doctest::Approx(0.5 * (m.xy[t[1]].x + m.xy[t[2]].x)));
        CHECK(f.xy[m20].x == doctest::Approx(0.5 * (m.xy[t[2]].x + m.xy[t[0]].x)));
        CHECK(f.tri[4 * c + 3][0] == m01);
        CHECK(f.tri[4 * c + 3][1] == m12);
        CHECK(f.tri[4 * c + 3][2] == m20);
        // Children inherit the region and quarter the area.
        for (int j = 0; j < 4; ++j) {
            CHECK(f.region[4 * c + j] == m.region[c]);
            CHECK(cell_geometry(f, 4 * c + j).area ==
                  doctest::Approx(0.25 * cell_geometry(m, c).area).epsilon(1e-10));
        }
    }

    // h halves, loop vertex count doubles.
    CHECK(mesh_stats(f).h_max == doctest::Approx(0.5 * mesh_stats(m).h_max));
    CHECK(f.loops[0].size() == 2 * m.loops[0].size());
}

TEST_CASE("deform: identity, inversion guard, clearance clamp") {
    Mesh m = test_mesh();
    const Mesh backup = m;

    VectorField zero(m.num_vertices());
    DeformOutcome o = deform(m, zero, 1.0);
    CHECK(o.ok);
    CHECK(o.t_applied == 1.0);
    for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(m.xy[v].x == backup.xy[v].x);
        CHECK(m.xy[v].y == backup.xy[v].y);
    }

    // Collapse one interior vertex across an opposite edge: must refuse and
    // leave the mesh untouched.
    int interior = -1;
    auto on_box = m.boundary_vertex_mask();
    for (int v = 0; v < m.num_vertices() && interior < 0; ++v)
        if (!on_box[v]) interior = v;
    REQUIRE(interior >= 0);
    VectorField bad(m.num_vertices());
    bad.x[interior] = 1.0;  // one meter: guaranteed inversion at t = 1
    o = deform(m, bad, 1.0);
    CHECK_FALSE(o.ok);
    for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(m.xy[v].x == backup.xy[v].x);
        CHECK(m.xy[v].y == backup.xy[v].y);
    }

    // Push the whole inclusion upward by a small step repeatedly: loop
    // vertices must never cross the clearance band below the skin.
    VectorField up(m.num_vertices());
    for (int v : m.loops[0]) up.y[v] = 1.0;
    // Interior non-loop vertices move too (half speed) so cells between the
    // loop and the skin can shear instead of inverting immediately.
    for (int v = 0; v < m.num_vertices(); ++v)
        if (!on_box[v] && up.y[v] == 0.0) up.y[v] = 0.5;
    for (int step = 0; step < 40; ++step) {
        DeformOutcome r = deform(m, up, 5e-4);
        if (!r.ok) break;
    }
    for (int v : m.loops[0]) {
        CHECK(m.xy[v].y <= 0.03 - kBoundaryClearance + 1e-12);
        CHECK(m.xy[v].y >= kBoundaryClearance - 1e-12);
    }
}

TEST_CASE("remesh preserves loop geometry") {
    Mesh m = test_mesh();
    // Deform a little so remesh has work to do.
    VectorField th(m.num_vertices());
    auto on_box = m.boundary_vertex_mask();
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (on_box[v]) continue;
        th.x[v] = std::sin(M_PI * m.xy[v].y / 0.03);
    }
    REQUIRE(deform(m, th, 2e-3).ok);
    std::vector<Vec2> before;
    for (int v : m.loops[0]) before.push_back(m.xy[v]);

    Mesh r = remesh(m);
    CHECK_NOTHROW(check_mesh(r));
    REQUIRE(r.loops.size() == 1);
    REQUIRE(r.loops[0].size() == before.size());
    for (size_t i = 0; i < before.size(); ++i) {
        CHECK(r.xy[r.loops[0][i]].x == before[i].x);
        CHECK(r.xy[r.loops[0][i]].y == before[i].y);
    }
}

TEST_CASE("save/load round trip is bit exact") {
    Mesh m = test_mesh();
    const std::string path =
        (std::filesystem::temp_directory_path() / "thermoshape_mesh_rt.txt").string();
    save_mesh(m, path);
    Mesh r = load_mesh(path);
    std::filesystem::remove(path);

    REQUIRE(r.num_vertices() == m.num_vertices());
    REQUIRE(r.num_cells() == m.num_cells());
    for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(r.xy[v].x == m.xy[v].x);  // bitwise: %.17g round trip
        CHECK(r.xy[v].y == m.xy[v].y);
    }
    CHECK(r.tri == m.tri);
    CHECK(r.region == m.region);
    CHECK(r.bedge == m.bedge);
    CHECK(r.loops == m.loops);
    CHECK(r.width == m.width);
    CHECK(r.height == m.height);
}

TEST_CASE("hausdorff_distance oracles") {
    // Two concentric polygonal circles: distance = radius gap (polygon chord
    // error is second order and the two share vertex angles).
    auto circ = [](double r, int n) {
        std::vector<Vec2> out;
        for (int i = 0; i < n; ++i) {
            const double a = 2.0 * M_PI * i / n;
            out.push_back({r * std::cos(a), r * std::sin(a)});
        }
        return out;
    };
    auto a = circ(1.0, 256);
    auto b = circ(1.25, 256);
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(hausdorff_distance(b, a) == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(hausdorff_distance(a, a) == 0.0);

    // Translated square: Hausdorff = translation for small shifts.
    std::vector<Vec2> s1{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<Vec2> s2 = s1;
    for (auto& p : s2) p.x += 0.1;
    CHECK(hausdorff_distance(s1, s2) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("polygon helpers") {
    std::vector<Vec2> sq{{0, 0}, {2, 0}, {2, 1}, {0, 1}};
    CHECK(polygon_area(sq) == doctest::Approx(2.0));
    std::reverse(sq.begin(), sq.end());
    CHECK(polygon_area(sq) == doctest::Approx(-2.0));
    std::reverse(sq.begin(), sq.end());

    CHECK(point_in_polygon({1.0, 0.5}, sq));
    CHECK_FALSE(point_in_polygon({3.0, 0.5}, sq));
    CHECK(distance_to_polyline({1.0, 2.0}, sq, true) == doctest::Approx(1.0));

    auto c = circle_polygon({0.5, 0.5}, 0.2, 0.05);
    CHECK(c.size() >= 24);
    CHECK(c.size() % 2 == 0);
    CHECK(polygon_area(c) > 0.0);  // CCW
    for (const auto& p : c)
        CHECK(norm(p - Vec2{0.5, 0.5}) == doctest::Approx(0.2).epsilon(1e-12));
    // Area approaches pi r^2 from below.
    CHECK(polygon_area(c) < M_PI * 0.04);
    CHECK(polygon_area(c) > 0.95 * M_PI * 0.04);
}

TEST_CASE("mesh_stats consistency") {
    Mesh m = test_mesh();
    MeshStats st = mesh_stats(m);
    double hmax = 0.0, amin = 1e300;
    for (int c = 0; c < m.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(m, c);
        hmax = std::max(hmax, g.h);
        amin = std::min(amin, g.a);
    }
    CHECK(st.h_max == doctest::Approx(hmax));
    CHECK(st.min_a == doctest::Approx(amin));
    CHECK(st.min_a_over_h > 0.0);
    CHECK(st.min_a_over_h <= 1.0);
}
