// Mesh construction, refinement, deformation and validity checking.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "thermoshape/mesh.hpp"
#include "triangulate.hpp"

namespace thermoshape {

namespace {

bool segments_properly_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
        return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 &&
           o2 != 0 && o3 != 0 && o4 != 0;
}

void validate_loops(double width, double height,
                    const std::vector<std::vector<Vec2>>& loops) {
    for (std::size_t li = 0; li < loops.size(); ++li) {
        const auto& loop = loops[li];
        if (loop.size() < 3)
            throw ConfigError("inclusion loop " + std::to_string(li) + " has fewer than 3 vertices");
        const double area = polygon_area(loop);
        if (std::abs(area) < 1e-12 * width * height)
            throw ConfigError("inclusion loop " + std::to_string(li) + " is degenerate (zero area)");
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Vec2 p = loop[i];
            const double clear = std::min({p.x, width - p.x, p.y, height - p.y});
            if (!(clear >= kBoundaryClearance * (1.0 - 1e-12)))
                throw ConfigError("inclusion loop " + std::to_string(li) + " vertex " +
                                  std::to_string(i) + " violates the boundary clearance");
            const Vec2 q = loop[(i + 1) % loop.size()];
            if (norm(q - p) == 0.0)
                throw ConfigError("inclusion loop " + std::to_string(li) +
                                  " has a zero-length segment at vertex " + std::to_string(i));
        }
        // Simplicity: no two non-adjacent segments may cross.
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
                if (segments_properly_cross(loop[i], loop[(i + 1) % n], loop[j],
                                            loop[(j + 1) % n]))
                    throw ConfigError("inclusion loop " + std::to_string(li) +
                                      " self-intersects");
            }
        }
    }
    // Loops must be pairwise disjoint and non-nested.
    for (std::size_t a = 0; a < loops.size(); ++a) {
        for (std::size_t b = a + 1; b < loops.size(); ++b) {
            for (std::size_t i = 0; i < loops[a].size(); ++i)
                for (std::size_t j = 0; j < loops[b].size(); ++j)
                    if (segments_properly_cross(loops[a][i], loops[a][(i + 1) % loops[a].size()],
                                                loops[b][j], loops[b][(j + 1) % loops[b].size()]))
                        throw ConfigError("inclusion loops " + std::to_string(a) + " and " +
                                          std::to_string(b) + " intersect");
            if (point_in_polygon(loops[a][0], loops[b]) || point_in_polygon(loops[b][0], loops[a]))
                throw ConfigError("inclusion loops " + std::to_string(a) + " and " +
                                  std::to_string(b) + " are nested");
        }
    }
}

// Assembles the full point set for triangulation: rectangle boundary points
// at ~target_h spacing, the loop vertices, and a staggered interior lattice
// kept clear of both.
Mesh triangulate_rectangle(double width, double height, double target_h,
                           std::vector<std::vector<Vec2>> loops) {
    validate_loops(width, height, loops);
    // Canonical loop orientation: CCW.
    for (auto& loop : loops)
        if (polygon_area(loop) < 0.0) std::reverse(loop.begin(), loop.end());

    std::vector<Vec2> pts;
    std::vector<char> locked_flags;
    auto push = [&](Vec2 p, char locked) {
        pts.push_back(p);
        locked_flags.push_back(locked);
    };

    // Rectangle boundary (corners exact, sides uniformly subdivided).
    const int nx = std::max(2, static_cast<int>(std::lround(width / target_h)));
    const int ny = std::max(2, static_cast<int>(std::lround(height / target_h)));
    for (int i = 0; i < nx; ++i) push({width * i / nx, 0.0}, 1);                 // bottom
    for (int j = 0; j < ny; ++j) push({width, height * j / ny}, 1);              // right
    for (int i = nx; i > 0; --i) push({width * i / nx, height}, 1);              // top
    for (int j = ny; j > 0; --j) push({0.0, height * j / ny}, 1);                // left

    // Loop vertices (constrained, locked).
    std::vector<std::vector<int>> loop_indices;
    for (const auto& loop : loops) {
        std::vector<int> idx;
        for (const Vec2& p : loop) {
            idx.push_back(static_cast<int>(pts.size()));
            push(p, 1);
        }
        loop_indices.push_back(std::move(idx));
    }

    // Stand-off band around each constrained polygon, scaled to its segment
    // length so small inclusions keep their interior points.
    std::vector<double> band(loops.size());
    for (std::size_t li = 0; li < loops.size(); ++li) {
        double seg = 0.0;
        const auto& loop = loops[li];
        for (std::size_t i = 0; i < loop.size(); ++i)
            seg = std::max(seg, norm(loop[(i + 1) % loop.size()] - loop[i]));
        band[li] = 0.5 * std::min(target_h, 2.5 * seg);
    }

    // Interior lattice: staggered rows, fixed fractional phase so that meshes
    // generated at different spacings never share interior coordinates.
    const double dy = target_h * 0.8660254037844386;  // sqrt(3)/2
    const double phase = 0.2151 * target_h;
    const double clear_boundary = 0.55 * target_h;
    int row = 0;
    for (double y = dy + phase * 0.5; y < height - clear_boundary; y += dy, ++row) {
        if (y < clear_boundary) continue;
        const double x0 = phase + (row % 2 ? 0.5 * target_h : 0.0);
        for (double x = x0; x < width - clear_boundary; x += target_h) {
            if (x < clear_boundary) continue;
            const Vec2 p{x, y};
            bool keep = true;
            for (std::size_t li = 0; li < loops.size(); ++li) {
                if (distance_to_polyline(p, loops[li], true) < band[li]) { keep = false; break; }
            }
            if (keep) push(p, 0);
        }
    }

    Mesh m = triangulate_with_loops(pts, loop_indices, locked_flags, width, height, 2);
    check_mesh(m);
    return m;
}

}  // namespace

Mesh build_rect_mesh(double width, double height, double target_h,
                     const std::vector<std::vector<Vec2>>& inclusion_loops) {
    if (!(width > 0.0) || !(height > 0.0))
        throw ConfigError("build_rect_mesh: rectangle extents must be positive");
    if (!(target_h > 0.0) || target_h > 0.5 * std::min(width, height))
        throw ConfigError("build_rect_mesh: invalid target spacing");
    return triangulate_rectangle(width, height, target_h, inclusion_loops);
}

Mesh remesh(const Mesh& m) {
    // Recover the background spacing from the immovable rectangle boundary.
    std::vector<double> lens;
    for (const auto& be : m.bedge) lens.push_back(norm(m.xy[be[1]] - m.xy[be[0]]));
    if (lens.empty()) throw ConfigError("remesh: mesh has no boundary edges");
    std::nth_element(lens.begin(), lens.begin() + lens.size() / 2, lens.end());
    const double target_h = lens[lens.size() / 2];

    std::vector<std::vector<Vec2>> loops;
    for (const auto& loop : m.loops) {
        std::vector<Vec2> poly;
        for (int v : loop) poly.push_back(m.xy[v]);
        loops.push_back(std::move(poly));
    }
    return triangulate_rectangle(m.width, m.height, target_h, loops);
}

Mesh refine_uniform(const Mesh& m) {
    Mesh r;
    r.width = m.width;
    r.height = m.height;
    r.xy = m.xy;

    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find({key.first, key.second});
        if (it != midpoint.end()) return it->second;
        const int idx = static_cast<int>(r.xy.size());
        r.xy.push_back({0.5 * (m.xy[a].x + m.xy[b].x), 0.5 * (m.xy[a].y + m.xy[b].y)});
        midpoint[{key.first, key.second}] = idx;
        return idx;
    };

    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.tri[c];
        const int m01 = mid(t[0], t[1]);
        const int m12 = mid(t[1], t[2]);
        const int m20 = mid(t[2], t[0]);
        r.tri.push_back({t[0], m01, m20});
        r.tri.push_back({t[1], m12, m01});
        r.tri.push_back({t[2], m20, m12});
        r.tri.push_back({m01, m12, m20});
        for (int k = 0; k < 4; ++k) r.region.push_back(m.region[c]);
    }

    for (const auto& be : m.bedge) {
        const int mm = mid(be[0], be[1]);
        r.bedge.push_back({be[0], mm, be[2]});
        r.bedge.push_back({mm, be[1], be[2]});
    }

    for (const auto& loop : m.loops) {
        std::vector<int> fine;
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) {
            fine.push_back(loop[i]);
            fine.push_back(mid(loop[i], loop[(i + 1) % n]));
        }
        r.loops.push_back(std::move(fine));
    }
    return r;
}

DeformOutcome deform(Mesh& m, const VectorField& theta, double t, double clearance) {
    if (theta.size() != m.num_vertices())
        throw ConfigError("deform: field size does not match the mesh");
    const std::vector<char> on_boundary = m.boundary_vertex_mask();
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (on_boundary[v] && (theta.x[v] != 0.0 || theta.y[v] != 0.0))
            throw NumericalError("deform: field does not vanish on the sample boundary (vertex " +
                                 std::to_string(v) + ")");
    }

    std::vector<Vec2> moved = m.xy;
    for (int v = 0; v < m.num_vertices(); ++v) {
        moved[v].x += t * theta.x[v];
        moved[v].y += t * theta.y[v];
    }

    // Project inclusion vertices back into the clearance box.  Clamping
    // per vertex (rather than damping the whole step) lets a vertex that
    // presses against the wall slide along it instead of freezing the
    // entire deformation.
    const double lo_x = clearance, hi_x = m.width - clearance;
    const double lo_y = clearance, hi_y = m.height - clearance;
    for (const auto& loop : m.loops) {
        for (int v : loop) {
            moved[v].x = std::clamp(moved[v].x, lo_x, hi_x);
            moved[v].y = std::clamp(moved[v].y, lo_y, hi_y);
        }
    }

    for (const auto& tri : m.tri) {
        const Vec2 a = moved[tri[0]], b = moved[tri[1]], c = moved[tri[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (!(det > 0.0)) return {false, t};
    }
    m.xy = std::move(moved);
    return {true, t};
}

void check_mesh(const Mesh& m) {
    const int nv = m.num_vertices();
    for (int c = 0; c < m.num_cells(); ++c) {
        for (int k = 0; k < 3; ++k) {
            if (m.tri[c][k] < 0 || m.tri[c][k] >= nv)
                throw NumericalError("check_mesh: cell " + std::to_string(c) +
                                     " references a missing vertex");
        }
        const Vec2 a = m.xy[m.tri[c][0]], b = m.xy[m.tri[c][1]], d = m.xy[m.tri[c][2]];
        const double det = (b.x - a.x) * (d.y - a.y) - (b.y - a.y) * (d.x - a.x);
        if (!(det > 0.0))
            throw NumericalError("check_mesh: cell " + std::to_string(c) +
                                 " is inverted or degenerate");
        if (m.region[c] != 0 && m.region[c] != 1)
            throw NumericalError("check_mesh: cell " + std::to_string(c) + " has an invalid region");
    }

    // Edge-to-cell incidence.
    std::map<std::pair<int, int>, std::vector<int>> edge_cells;
    for (int c = 0; c < m.num_cells(); ++c) {
        for (int k = 0; k < 3; ++k) {
            int u = m.tri[c][k], v = m.tri[c][(k + 1) % 3];
            if (u > v) std::swap(u, v);
            edge_cells[{u, v}].push_back(c);
        }
    }
    for (const auto& [e, cells] : edge_cells) {
        if (cells.size() > 2)
            throw NumericalError("check_mesh: edge (" + std::to_string(e.first) + "," +
                                 std::to_string(e.second) + ") is non-manifold");
    }

    std::set<std::pair<int, int>> recorded_boundary;
    for (const auto& be : m.bedge) {
        auto key = std::minmax(be[0], be[1]);
        auto it = edge_cells.find({key.first, key.second});
        if (it == edge_cells.end() || it->second.size() != 1)
            throw NumericalError("check_mesh: boundary edge (" + std::to_string(be[0]) + "," +
                                 std::to_string(be[1]) + ") is not a one-sided mesh edge");
        recorded_boundary.insert({key.first, key.second});
    }
    for (const auto& [e, cells] : edge_cells) {
        if (cells.size() == 1 && !recorded_boundary.count(e))
            throw NumericalError("check_mesh: hull edge (" + std::to_string(e.first) + "," +
                                 std::to_string(e.second) + ") missing from the boundary records");
    }

    // Interface edges separate the two regions, and all separating edges
    // belong to some loop.
    std::set<std::pair<int, int>> loop_edges;
    for (const auto& ie : m.interface_edges()) {
        auto key = std::minmax(ie[0], ie[1]);
        auto it = edge_cells.find({key.first, key.second});
        if (it == edge_cells.end() || it->second.size() != 2)
            throw NumericalError("check_mesh: interface segment (" + std::to_string(ie[0]) + "," +
                                 std::to_string(ie[1]) + ") is not an interior mesh edge");
        if (m.region[it->second[0]] == m.region[it->second[1]])
            throw NumericalError("check_mesh: interface segment (" + std::to_string(ie[0]) + "," +
                                 std::to_string(ie[1]) + ") does not separate regions");
        loop_edges.insert({key.first, key.second});
    }
    for (const auto& [e, cells] : edge_cells) {
        if (cells.size() == 2 && m.region[cells[0]] != m.region[cells[1]] && !loop_edges.count(e))
            throw NumericalError("check_mesh: region-separating edge (" + std::to_string(e.first) +
                                 "," + std::to_string(e.second) + ") is not part of any loop");
    }

    for (std::size_t li = 0; li < m.loops.size(); ++li) {
        std::vector<Vec2> poly;
        for (int v : m.loops[li]) poly.push_back(m.xy[v]);
        if (polygon_area(poly) <= 0.0)
            throw NumericalError("check_mesh: loop " + std::to_string(li) +
                                 " is not counter-clockwise");
    }
}

}  // namespace thermoshape
