#include <algorithm>
#include <cmath>
#include <limits>

#include "thermoshape/mesh.hpp"

namespace thermoshape {

CellGeometry cell_geometry(Vec2 p0, Vec2 p1, Vec2 p2) {
    CellGeometry g;
    g.e[0][0] = p1.x - p0.x;
    g.e[0][1] = p2.x - p0.x;
    g.e[1][0] = p1.y - p0.y;
    g.e[1][1] = p2.y - p0.y;

    g.det = g.e[0][0] * g.e[1][1] - g.e[0][1] * g.e[1][0];
    if (g.det == 0.0) throw NumericalError("cell_geometry: degenerate cell (zero area)");
    g.area = 0.5 * std::abs(g.det);

    const double inv_det = 1.0 / g.det;
    g.inv_e[0][0] = g.e[1][1] * inv_det;
    g.inv_e[0][1] = -g.e[0][1] * inv_det;
    g.inv_e[1][0] = -g.e[1][0] * inv_det;
    g.inv_e[1][1] = g.e[0][0] * inv_det;

    // Rows of E^{-T} are the gradients of the barycentric coordinates
    // lambda_1, lambda_2; lambda_0 closes the partition of unity.
    g.grad_lambda[1] = {g.inv_e[0][0], g.inv_e[0][1]};
    g.grad_lambda[2] = {g.inv_e[1][0], g.inv_e[1][1]};
    g.grad_lambda[0] = {-g.grad_lambda[1].x - g.grad_lambda[2].x,
                        -g.grad_lambda[1].y - g.grad_lambda[2].y};

    g.h = std::max({norm(p1 - p0), norm(p2 - p1), norm(p0 - p2)});
    double a = std::numeric_limits<double>::infinity();
    for (const Vec2& gl : g.grad_lambda) a = std::min(a, 1.0 / norm(gl));
    g.a = a;
    return g;
}

CellGeometry cell_geometry(const Mesh& m, int cell) {
    const auto& t = m.tri[cell];
    return cell_geometry(m.xy[t[0]], m.xy[t[1]], m.xy[t[2]]);
}

MeshStats mesh_stats(const Mesh& m) {
    MeshStats s;
    s.min_a = std::numeric_limits<double>::infinity();
    s.min_a_over_h = std::numeric_limits<double>::infinity();
    for (int c = 0; c < m.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(m, c);
        s.h_max = std::max(s.h_max, g.h);
        s.min_a = std::min(s.min_a, g.a);
        s.max_h_over_a = std::max(s.max_h_over_a, g.h / g.a);
        s.min_a_over_h = std::min(s.min_a_over_h, g.a / g.h);
    }
    return s;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        twice += cross(a, b);
    }
    return 0.5 * twice;
}

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

}  // namespace

double distance_to_polyline(Vec2 p, const std::vector<Vec2>& poly, bool closed) {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    const std::size_t segs = closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i) {
        d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    }
    return d;
}

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.empty() || b.empty()) throw ConfigError("hausdorff_distance: empty polyline");
    double h = 0.0;
    for (const Vec2& p : a) h = std::max(h, distance_to_polyline(p, b, true));
    for (const Vec2& p : b) h = std::max(h, distance_to_polyline(p, a, true));
    return h;
}

std::vector<std::array<int, 2>> Mesh::interface_edges() const {
    std::vector<std::array<int, 2>> edges;
    for (const auto& loop : loops) {
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) {
            edges.push_back({loop[i], loop[(i + 1) % n]});
        }
    }
    return edges;
}

std::vector<char> Mesh::boundary_vertex_mask() const {
    std::vector<char> mask(xy.size(), 0);
    for (const auto& be : bedge) {
        mask[be[0]] = 1;
        mask[be[1]] = 1;
    }
    return mask;
}

std::vector<Vec2> circle_polygon(Vec2 center, double radius, double target_h) {
    if (!(radius > 0.0) || !(target_h > 0.0))
        throw ConfigError("circle_polygon: radius and target_h must be positive");
    // Segment length about 0.4 * target_h so the interface is finer than the
    // bulk; even count keeps a vertex on both the left and right extremes.
    int n = std::max(24, static_cast<int>(
                             std::ceil(2.0 * M_PI * radius / (0.4 * target_h))));
    if (n % 2) ++n;
    std::vector<Vec2> poly;
    poly.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / n;
        poly.push_back({center.x + radius * std::cos(a),
                        center.y + radius * std::sin(a)});
    }
    return poly;
}

}  // namespace thermoshape
