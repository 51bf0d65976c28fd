// Constrained Delaunay triangulation of a rectangle with interior polygonal
// loops.  Incremental insertion (1->3 split, 2->4 split for points landing on
// an edge) with Lawson flips, followed by constraint-edge recovery by flipping
// the edges that cross each loop segment, super-triangle removal, region
// marking and a guarded Laplacian smoothing pass.
//
// Predicates use doubles with relative margins.  Flips happen only on strict
// in-circle violation and only when the flipped pair stays strictly positive,
// so the triangulation remains valid even where the margin blurs exact
// cocircularity.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <vector>

#include "thermoshape/mesh.hpp"

namespace thermoshape {

namespace {

struct Tri {
    std::array<int, 3> v;   // CCW vertices
    std::array<int, 3> n;   // n[i]: neighbor across edge opposite v[i]
    std::array<char, 3> c;  // constrained flag, same indexing as n
    bool alive = true;
};

double orient(Vec2 a, Vec2 b, Vec2 p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// > 0 when d lies strictly inside the circumcircle of CCW (a, b, c).
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - bd2 * cdy) - ady * (bdx * cd2 - bd2 * cdx) +
           ad2 * (bdx * cdy - bdy * cdx);
}

double incircle_margin(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double m2 = std::max({adx * adx + ady * ady, bdx * bdx + bdy * bdy,
                                cdx * cdx + cdy * cdy});
    return 1e-11 * m2 * m2;
}

// Proper (interior) segment crossing; endpoint touches do not count.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    return ((o1 > 0.0) != (o2 > 0.0)) && ((o3 > 0.0) != (o4 > 0.0)) &&
           o1 != 0.0 && o2 != 0.0 && o3 != 0.0 && o4 != 0.0;
}

class Triangulator {
public:
    Triangulator(std::vector<Vec2> pts, double span)
        : pts_(std::move(pts)), span_(span) {
        const int n = static_cast<int>(pts_.size());
        // Super-triangle vertices go after the real points, so surviving
        // triangles never need an index remap.
        const double m = 40.0 * span_;
        pts_.push_back({-m, -m});
        pts_.push_back({m, -m});
        pts_.push_back({0.0, m});
        tris_.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, {0, 0, 0}, true});
        vert2tri_.assign(pts_.size(), -1);
        vert2tri_[n] = vert2tri_[n + 1] = vert2tri_[n + 2] = 0;
        n_real_ = n;
        last_ = 0;
        for (int i = 0; i < n; ++i) insert(i);
    }

    void recover_segment(int a, int b);
    void remove_super();
    void smooth(const std::vector<char>& locked, int passes);

    // Accessors used when extracting the final mesh.
    const std::vector<Tri>& tris() const { return tris_; }
    const std::vector<Vec2>& pts() const { return pts_; }
    int n_real() const { return n_real_; }

private:
    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> vert2tri_;
    double span_;
    int n_real_;
    int last_;  // walking hint

    int nbr_index(int t, int o) const {
        for (int i = 0; i < 3; ++i)
            if (tris_[o].n[i] == t) return i;
        throw NumericalError("triangulate: adjacency corrupted");
    }

    void relink(int outer, int from, int to) {
        if (outer < 0) return;
        for (int i = 0; i < 3; ++i)
            if (tris_[outer].n[i] == from) {
                tris_[outer].n[i] = to;
                return;
            }
        throw NumericalError("triangulate: neighbor relink failed");
    }

    int vertex_index(int t, int v) const {
        for (int i = 0; i < 3; ++i)
            if (tris_[t].v[i] == v) return i;
        return -1;
    }

    std::pair<int, int> locate(Vec2 p) const;
    void insert(int vi);
    void lawson(std::deque<std::pair<int, int>>& suspects);
    bool flip(int t, int i, int* new_diag_tri = nullptr);
    std::pair<int, int> find_edge(int a, int b) const;
    std::vector<int> fan(int v) const;
};

std::pair<int, int> Triangulator::locate(Vec2 p) const {
    int t = last_;
    if (t < 0 || !tris_[t].alive) {
        t = -1;
        for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
            if (tris_[i].alive) { t = i; break; }
    }
    const int max_steps = static_cast<int>(tris_.size()) * 4 + 64;
    for (int step = 0; step < max_steps; ++step) {
        const Tri& tr = tris_[t];
        const Vec2 A = pts_[tr.v[0]], B = pts_[tr.v[1]], C = pts_[tr.v[2]];
        const double o0 = orient(B, C, p);  // opposite v0
        const double o1 = orient(C, A, p);
        const double o2 = orient(A, B, p);
        int worst = -1;
        double worst_val = 0.0;
        const double vals[3] = {o0, o1, o2};
        for (int i = 0; i < 3; ++i) {
            if (vals[i] < worst_val) { worst_val = vals[i]; worst = i; }
        }
        if (worst < 0) {
            // Inside or on an edge: classify with a relative margin.
            const Vec2 vv[3] = {A, B, C};
            for (int i = 0; i < 3; ++i) {
                const Vec2 ea = vv[(i + 1) % 3], eb = vv[(i + 2) % 3];
                const double len = norm(eb - ea);
                if (std::abs(vals[i]) <= 1e-12 * len * std::max(norm(p - ea), len))
                    return {t, i};
            }
            return {t, -1};
        }
        const int next = tr.n[worst];
        if (next < 0) throw NumericalError("triangulate: walked out of the hull");
        t = next;
    }
    // Degenerate walk (should not happen): brute-force scan.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
        if (!tris_[i].alive) continue;
        const Tri& tr = tris_[i];
        if (orient(pts_[tr.v[0]], pts_[tr.v[1]], p) >= 0 &&
            orient(pts_[tr.v[1]], pts_[tr.v[2]], p) >= 0 &&
            orient(pts_[tr.v[2]], pts_[tr.v[0]], p) >= 0)
            return {i, -1};
    }
    throw NumericalError("triangulate: point location failed");
}

void Triangulator::insert(int vi) {
    const Vec2 p = pts_[vi];
    auto [t, onedge] = locate(p);
    std::deque<std::pair<int, int>> suspects;

    if (onedge < 0) {
        // 1 -> 3 split.
        const Tri old = tris_[t];
        const int ia = old.v[0], ib = old.v[1], ic = old.v[2];
        const int t0 = t;
        const int t1 = static_cast<int>(tris_.size());
        const int t2 = t1 + 1;
        tris_[t0] = {{ia, ib, vi}, {t1, t2, old.n[2]}, {0, 0, old.c[2]}, true};
        tris_.push_back({{ib, ic, vi}, {t2, t0, old.n[0]}, {0, 0, old.c[0]}, true});
        tris_.push_back({{ic, ia, vi}, {t0, t1, old.n[1]}, {0, 0, old.c[1]}, true});
        relink(old.n[0], t, t1);
        relink(old.n[1], t, t2);
        // old.n[2] keeps pointing at t0.
        vert2tri_[vi] = t0;
        vert2tri_[ia] = t0;
        vert2tri_[ib] = t0;
        vert2tri_[ic] = t1;
        suspects.push_back({t0, 2});
        suspects.push_back({t1, 2});
        suspects.push_back({t2, 2});
    } else {
        // 2 -> 4 split: p lies on the edge opposite tris_[t].v[onedge].
        const int o = tris_[t].n[onedge];
        if (o < 0) throw NumericalError("triangulate: point on hull edge");
        const Tri told = tris_[t];
        const Tri oold = tris_[o];
        const int a = told.v[onedge];
        const int b = told.v[(onedge + 1) % 3];
        const int c = told.v[(onedge + 2) % 3];
        const int jd = nbr_index(t, o);
        const int d = oold.v[jd];
        // Neighbors of the quad, named by the edge they sit across.
        const int T_ca = told.n[(onedge + 1) % 3];
        const int T_ab = told.n[(onedge + 2) % 3];
        const char c_ca = told.c[(onedge + 1) % 3];
        const char c_ab = told.c[(onedge + 2) % 3];
        // In o the shared edge runs (c, b), so v[(jd+1)%3] = c and
        // v[(jd+2)%3] = b; edge (jd+1) is across (b, d), edge (jd+2) across (d, c).
        const int O_bd = oold.n[(jd + 1) % 3];
        const int O_dc = oold.n[(jd + 2) % 3];
        const char c_bd = oold.c[(jd + 1) % 3];
        const char c_dc = oold.c[(jd + 2) % 3];

        const int t0 = t;                      // (a, b, p)
        const int t1 = o;                      // (p, b, d) -> keep CCW: (b, d, p)
        const int t2 = static_cast<int>(tris_.size());  // (p, d, c) -> (d, c, p)
        const int t3 = t2 + 1;                 // (a, p, c) -> (c, a, p)
        tris_[t0] = {{a, b, vi}, {t1, t3, T_ab}, {0, 0, c_ab}, true};
        tris_[t1] = {{b, d, vi}, {t2, t0, O_bd}, {0, 0, c_bd}, true};
        tris_.push_back({{d, c, vi}, {t3, t1, O_dc}, {0, 0, c_dc}, true});
        tris_.push_back({{c, a, vi}, {t0, t2, T_ca}, {0, 0, c_ca}, true});
        relink(T_ab, t, t0);
        relink(T_ca, t, t3);
        relink(O_bd, o, t1);
        relink(O_dc, o, t2);
        vert2tri_[vi] = t0;
        vert2tri_[a] = t0;
        vert2tri_[b] = t0;
        vert2tri_[c] = t2;
        vert2tri_[d] = t1;
        suspects.push_back({t0, 2});
        suspects.push_back({t1, 2});
        suspects.push_back({t2, 2});
        suspects.push_back({t3, 2});
    }
    last_ = vert2tri_[vi];
    lawson(suspects);
}

// Flip the edge opposite tris_[t].v[i].  Returns false when the flip would
// create a non-positive triangle.  On success *new_diag_tri receives one of
// the two triangles adjacent to the new diagonal.
bool Triangulator::flip(int t, int i, int* new_diag_tri) {
    const int o = tris_[t].n[i];
    if (o < 0 || tris_[t].c[i]) return false;
    const Tri told = tris_[t];
    const int j = nbr_index(t, o);
    const Tri oold = tris_[o];

    const int a = told.v[i];
    const int b = told.v[(i + 1) % 3];
    const int c = told.v[(i + 2) % 3];
    const int d = oold.v[j];

    const Vec2 A = pts_[a], B = pts_[b], C = pts_[c], D = pts_[d];
    const double area_abd = orient(A, B, D);
    const double area_adc = orient(A, D, C);
    const double margin = 1e-13 * span_ * span_;
    if (area_abd <= margin || area_adc <= margin) return false;

    const int T_ca = told.n[(i + 1) % 3];
    const int T_ab = told.n[(i + 2) % 3];
    const char c_ca = told.c[(i + 1) % 3];
    const char c_ab = told.c[(i + 2) % 3];
    // o = (..d..) CCW with shared edge (c, b): v[(j+1)%3] = c, v[(j+2)%3] = b.
    const int O_bd = oold.n[(j + 1) % 3];  // across (b, d)
    const int O_dc = oold.n[(j + 2) % 3];  // across (d, c)
    const char c_bd = oold.c[(j + 1) % 3];
    const char c_dc = oold.c[(j + 2) % 3];

    tris_[t] = {{a, b, d}, {O_bd, o, T_ab}, {c_bd, 0, c_ab}, true};
    tris_[o] = {{a, d, c}, {O_dc, T_ca, t}, {c_dc, c_ca, 0}, true};
    relink(O_bd, o, t);
    relink(T_ca, t, o);
    // T_ab keeps t; O_dc keeps o.
    vert2tri_[a] = t;
    vert2tri_[b] = t;
    vert2tri_[c] = o;
    vert2tri_[d] = t;
    if (new_diag_tri) *new_diag_tri = t;
    return true;
}

void Triangulator::lawson(std::deque<std::pair<int, int>>& suspects) {
    std::size_t guard = 0;
    const std::size_t cap = tris_.size() * 64 + 4096;
    while (!suspects.empty()) {
        if (++guard > cap) throw NumericalError("triangulate: flip cascade did not settle");
        auto [t, i] = suspects.front();
        suspects.pop_front();
        if (t >= static_cast<int>(tris_.size()) || !tris_[t].alive) continue;
        const int o = tris_[t].n[i];
        if (o < 0 || tris_[t].c[i]) continue;
        const int j = nbr_index(t, o);
        const int a = tris_[t].v[i];
        const int b = tris_[t].v[(i + 1) % 3];
        const int c = tris_[t].v[(i + 2) % 3];
        const int d = tris_[o].v[j];
        const Vec2 A = pts_[a], B = pts_[b], C = pts_[c], D = pts_[d];
        if (incircle(A, B, C, D) <= incircle_margin(A, B, C, D)) continue;
        if (!flip(t, i)) continue;
        // After the flip t = (a,b,d) and o = (a,d,c); re-suspect the four
        // outer edges (everything except the new diagonal (a,d)).
        suspects.push_back({t, 0});  // (b, d)
        suspects.push_back({t, 2});  // (a, b)
        suspects.push_back({o, 0});  // (d, c)
        suspects.push_back({o, 1});  // (c, a)
    }
}

std::pair<int, int> Triangulator::find_edge(int a, int b) const {
    for (int t : fan(a)) {
        for (int i = 0; i < 3; ++i) {
            const int u = tris_[t].v[(i + 1) % 3];
            const int v = tris_[t].v[(i + 2) % 3];
            if ((u == a && v == b) || (u == b && v == a)) return {t, i};
        }
    }
    return {-1, -1};
}

std::vector<int> Triangulator::fan(int v) const {
    std::vector<int> out;
    int start = vert2tri_[v];
    if (start < 0 || !tris_[start].alive || vertex_index(start, v) < 0) {
        // Hint is stale: fall back to a scan for a holder.
        start = -1;
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
            if (tris_[t].alive && vertex_index(t, v) >= 0) { start = t; break; }
        if (start < 0) return out;
    }
    // Rotate around v; the super-triangle guarantees closed fans before
    // removal, afterwards we may hit the hull and need the reverse sweep.
    int t = start;
    int guard = 0;
    while (true) {
        out.push_back(t);
        const int i = vertex_index(t, v);
        const int next = tris_[t].n[(i + 1) % 3];  // across edge (v[i+2], v[i]) — rotates CCW
        if (next < 0) break;
        if (next == start) return out;
        t = next;
        if (++guard > 1024) throw NumericalError("triangulate: fan walk stuck");
    }
    // Hit the hull: sweep the other way from start.
    t = start;
    guard = 0;
    while (true) {
        const int i = vertex_index(t, v);
        const int prev = tris_[t].n[(i + 2) % 3];
        if (prev < 0) break;
        out.push_back(prev);
        t = prev;
        if (++guard > 1024) throw NumericalError("triangulate: fan walk stuck");
    }
    return out;
}

void Triangulator::recover_segment(int a, int b) {
    auto mark = [&](int t, int i) {
        tris_[t].c[i] = 1;
        const int o = tris_[t].n[i];
        if (o >= 0) tris_[o].c[nbr_index(t, o)] = 1;
    };

    {
        auto [t, i] = find_edge(a, b);
        if (t >= 0) { mark(t, i); return; }
    }

    const Vec2 A = pts_[a], B = pts_[b];

    // Collect edges currently crossing the segment.
    std::deque<std::array<int, 2>> q;
    {
        int start_tri = -1, exit_edge = -1;
        for (int t : fan(a)) {
            const int i = vertex_index(t, a);
            const int u = tris_[t].v[(i + 1) % 3];
            const int v = tris_[t].v[(i + 2) % 3];
            if (segments_cross(A, B, pts_[u], pts_[v])) {
                start_tri = t;
                exit_edge = i;
                break;
            }
        }
        if (start_tri < 0)
            throw NumericalError("triangulate: constraint recovery lost the segment start");
        int t = start_tri, e = exit_edge;
        int guard = 0;
        while (true) {
            if (++guard > 4096)
                throw NumericalError("triangulate: constraint crossing walk stuck");
            const int u = tris_[t].v[(e + 1) % 3];
            const int v = tris_[t].v[(e + 2) % 3];
            q.push_back({u, v});
            const int o = tris_[t].n[e];
            if (o < 0) throw NumericalError("triangulate: constraint leaves the hull");
            if (vertex_index(o, b) >= 0) break;
            const int j = nbr_index(t, o);
            // The segment leaves o through one of the two edges flanking v[j].
            int next_e = -1;
            for (int k = 1; k <= 2; ++k) {
                const int ee = (j + k) % 3;
                const int uu = tris_[o].v[(ee + 1) % 3];
                const int vv = tris_[o].v[(ee + 2) % 3];
                if (segments_cross(A, B, pts_[uu], pts_[vv])) { next_e = ee; break; }
            }
            if (next_e < 0)
                throw NumericalError("triangulate: constraint passes through a vertex");
            t = o;
            e = next_e;
        }
    }

    // Flip crossing edges away (Sloan's algorithm).
    std::size_t guard = 0;
    const std::size_t cap = q.size() * q.size() * 64 + 4096;
    while (!q.empty()) {
        if (++guard > cap) throw NumericalError("triangulate: constraint recovery stuck");
        auto [u, v] = q.front();
        q.pop_front();
        auto [t, i] = find_edge(u, v);
        if (t < 0) continue;  // already flipped away
        int diag_holder = -1;
        if (!flip(t, i, &diag_holder)) {
            q.push_back({u, v});
            continue;
        }
        // The replacement diagonal is the one edge of the rewritten triangle
        // whose endpoints are neither u nor v; keep it queued while it still
        // crosses the constraint.
        for (int k = 0; k < 3; ++k) {
            const int uu = tris_[diag_holder].v[(k + 1) % 3];
            const int vv = tris_[diag_holder].v[(k + 2) % 3];
            if (uu != u && uu != v && vv != u && vv != v) {
                if (segments_cross(A, B, pts_[uu], pts_[vv])) q.push_back({uu, vv});
                break;
            }
        }
    }

    auto [t, i] = find_edge(a, b);
    if (t < 0) throw NumericalError("triangulate: failed to recover a constraint edge");
    mark(t, i);
}

void Triangulator::remove_super() {
    for (auto& tr : tris_) {
        if (!tr.alive) continue;
        if (tr.v[0] >= n_real_ || tr.v[1] >= n_real_ || tr.v[2] >= n_real_) {
            tr.alive = false;
        }
    }
    // Clear adjacency into dead triangles.
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
        if (!tris_[t].alive) continue;
        for (int i = 0; i < 3; ++i) {
            const int o = tris_[t].n[i];
            if (o >= 0 && !tris_[o].alive) tris_[t].n[i] = -1;
        }
    }
    for (int v = 0; v < n_real_; ++v) vert2tri_[v] = -1;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
        if (!tris_[t].alive) continue;
        for (int i = 0; i < 3; ++i) vert2tri_[tris_[t].v[i]] = t;
    }
}

void Triangulator::smooth(const std::vector<char>& locked, int passes) {
    for (int pass = 0; pass < passes; ++pass) {
        for (int v = 0; v < n_real_; ++v) {
            if (locked[v] || vert2tri_[v] < 0) continue;
            const std::vector<int> star = fan(v);
            if (star.empty()) continue;
            bool on_hull = false;
            Vec2 acc{0.0, 0.0};
            int count = 0;
            for (int t : star) {
                const int i = vertex_index(t, v);
                if (tris_[t].n[(i + 1) % 3] < 0 || tris_[t].n[(i + 2) % 3] < 0)
                    on_hull = true;
                acc = acc + pts_[tris_[t].v[(i + 1) % 3]];
                ++count;  // each fan triangle contributes its CCW-next vertex once
            }
            if (on_hull || count == 0) continue;
            const Vec2 candidate = (1.0 / count) * acc;
            const Vec2 old = pts_[v];
            pts_[v] = candidate;
            bool ok = true;
            for (int t : star) {
                const Vec2 P0 = pts_[tris_[t].v[0]];
                const Vec2 P1 = pts_[tris_[t].v[1]];
                const Vec2 P2 = pts_[tris_[t].v[2]];
                if (orient(P0, P1, P2) <= 1e-13 * span_ * span_) { ok = false; break; }
            }
            if (!ok) pts_[v] = old;
        }
        // Restore local Delaunay-ness after the moves.
        std::deque<std::pair<int, int>> suspects;
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
            if (!tris_[t].alive) continue;
            for (int i = 0; i < 3; ++i)
                if (tris_[t].n[i] > t) suspects.push_back({t, i});
        }
        lawson(suspects);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry point used by build_rect_mesh / remesh: triangulate a fixed
// point set with constrained loop segments, classify regions, extract records.
// ---------------------------------------------------------------------------
Mesh triangulate_with_loops(const std::vector<Vec2>& points,
                            const std::vector<std::vector<int>>& loop_indices,
                            const std::vector<char>& locked,
                            double width, double height, int smooth_passes) {
    Triangulator tr(points, std::max(width, height));
    for (const auto& loop : loop_indices) {
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) tr.recover_segment(loop[i], loop[(i + 1) % n]);
    }
    tr.remove_super();
    tr.smooth(locked, smooth_passes);

    Mesh m;
    m.width = width;
    m.height = height;
    m.xy.assign(tr.pts().begin(), tr.pts().begin() + tr.n_real());
    m.loops = loop_indices;

    // Loop polygons for region classification.
    std::vector<std::vector<Vec2>> polys;
    for (const auto& loop : loop_indices) {
        std::vector<Vec2> poly;
        poly.reserve(loop.size());
        for (int v : loop) poly.push_back(m.xy[v]);
        polys.push_back(std::move(poly));
    }

    for (const auto& t : tr.tris()) {
        if (!t.alive) continue;
        m.tri.push_back({t.v[0], t.v[1], t.v[2]});
        const Vec2 c = (1.0 / 3.0) * (m.xy[t.v[0]] + m.xy[t.v[1]] + m.xy[t.v[2]]);
        int region = 1;
        for (const auto& poly : polys) {
            if (point_in_polygon(c, poly)) { region = 0; break; }
        }
        m.region.push_back(region);
    }

    // Boundary edges = one-sided edges; tag by which rectangle side they lie on.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : m.tri) {
        for (int i = 0; i < 3; ++i) {
            int u = t[i], v = t[(i + 1) % 3];
            if (u > v) std::swap(u, v);
            edge_count[{u, v}]++;
        }
    }
    const double tol = 1e-9 * std::max(width, height);
    for (const auto& [e, cnt] : edge_count) {
        if (cnt == 1) {
            const Vec2 pa = m.xy[e.first], pb = m.xy[e.second];
            int tag;
            if (std::abs(pa.y - height) < tol && std::abs(pb.y - height) < tol)
                tag = kTagSkin;
            else if (std::abs(pa.y) < tol && std::abs(pb.y) < tol)
                tag = kTagBase;
            else if ((std::abs(pa.x) < tol && std::abs(pb.x) < tol) ||
                     (std::abs(pa.x - width) < tol && std::abs(pb.x - width) < tol))
                tag = kTagLateral;
            else
                throw NumericalError("triangulate: hull edge not on the rectangle boundary");
            m.bedge.push_back({e.first, e.second, tag});
        } else if (cnt != 2) {
            throw NumericalError("triangulate: non-manifold edge");
        }
    }
    return m;
}

}  // namespace thermoshape
