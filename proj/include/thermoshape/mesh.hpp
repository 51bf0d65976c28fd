#pragma once
// Conforming triangular meshes of a rectangular tissue sample with one or
// more embedded inclusions.  The inclusion boundaries are polygonal loops
// whose segments appear verbatim as mesh edges, so every cell lies entirely
// inside or outside an inclusion.
//
// Boundary tags: 0 = skin edge (Robin, measured side), 1 = lateral edges
// (adiabatic), 2 = base edge (Dirichlet body-core temperature).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "thermoshape/common.hpp"

namespace thermoshape {

constexpr int kTagSkin = 0;     // Gamma_u: y = height
constexpr int kTagLateral = 1;  // Gamma_w: x = 0 and x = width
constexpr int kTagBase = 2;     // Gamma_b: y = 0

// Minimum distance the inclusion boundary must keep from the sample boundary.
constexpr double kBoundaryClearance = 0.002;

struct Mesh {
    std::vector<Vec2> xy;                    // vertex coordinates
    std::vector<std::array<int, 3>> tri;     // CCW vertex triples
    std::vector<int> region;                 // per cell: 0 inclusion, 1 tissue
    std::vector<std::array<int, 3>> bedge;   // boundary edge: v0, v1, tag
    std::vector<std::vector<int>> loops;     // per inclusion: CCW vertex cycle

    double width = 0.0;   // rectangle extents, recovered from vertices on load
    double height = 0.0;

    int num_vertices() const { return static_cast<int>(xy.size()); }
    int num_cells() const { return static_cast<int>(tri.size()); }

    // Interface edges (v0, v1) in loop order, all loops concatenated.
    std::vector<std::array<int, 2>> interface_edges() const;

    // True if the vertex lies on the rectangle boundary.
    std::vector<char> boundary_vertex_mask() const;
};

// Per-cell geometry derived from the edge matrix E = [x1-x0, x2-x0].
// grad_lambda[i] is the gradient of the i-th barycentric coordinate;
// the i-th vertex height is 1/|grad_lambda[i]| and a = min over i of it.
struct CellGeometry {
    double e[2][2];        // edge matrix, column j is x_{j+1} - x_0
    double inv_e[2][2];    // E^{-1}
    Vec2 grad_lambda[3];
    double area;           // |det E| / 2
    double h;              // longest side
    double a;              // smallest vertex height
    double det;            // det E (signed; positive for CCW cells)
};

CellGeometry cell_geometry(Vec2 p0, Vec2 p1, Vec2 p2);
CellGeometry cell_geometry(const Mesh& m, int cell);

// Mesh-wide quality/size statistics.
struct MeshStats {
    double h_max = 0.0;
    double min_a = 0.0;
    double max_h_over_a = 0.0;   // smoothness measure of the cell family
    double min_a_over_h = 0.0;   // remesh trigger: below 0.05 means degenerate
};
MeshStats mesh_stats(const Mesh& m);

// Builds a conforming triangulation of [0,w] x [0,h] with the given inclusion
// loops as constrained interior boundaries.  target_h controls the background
// vertex spacing.  Throws ConfigError if a loop is degenerate, not simple,
// or violates the boundary clearance.
Mesh build_rect_mesh(double width, double height, double target_h,
                     const std::vector<std::vector<Vec2>>& inclusion_loops);

// Rebuilds the bulk triangulation around the current (deformed) inclusion
// loops, preserving loop vertex positions exactly.  The background spacing is
// recovered from the (immovable) rectangle boundary discretization.
Mesh remesh(const Mesh& m);

// Uniform refinement: every cell splits into four via edge midpoints.
// Inclusion loops gain their segment midpoints, regions are inherited.
Mesh refine_uniform(const Mesh& m);

// Nodal vector field (velocity / descent direction), one Vec2 per vertex.
struct VectorField {
    std::vector<double> x, y;
    explicit VectorField(int n = 0) : x(n, 0.0), y(n, 0.0) {}
    int size() const { return static_cast<int>(x.size()); }
    Vec2 at(int i) const { return {x[i], y[i]}; }
};

struct DeformOutcome {
    bool ok = false;        // false: some cell would invert at this step
    double t_applied = 0.0;  // equals the requested t when ok
};

// Moves vertices by t * theta, then projects every inclusion-loop vertex
// back into the clearance box [c, w-c] x [c, h-c] (componentwise clamp, so
// a vertex pressing against the wall slides along it rather than stalling
// the step).  If any cell inverts after the move the mesh is left unchanged
// and ok = false.  theta must vanish on the rectangle boundary.
DeformOutcome deform(Mesh& m, const VectorField& theta, double t,
                     double clearance = kBoundaryClearance);

// Structural soundness: CCW cells, two-sided interior edges, consistent
// boundary/interface records, loop segments present as edges, regions
// matching loop interiors.  Throws NumericalError naming the first offender.
void check_mesh(const Mesh& m);

// Text format round trip (bit-exact: coordinates are printed with enough
// digits to reparse to identical doubles).
void save_mesh(const Mesh& m, const std::string& path);
Mesh load_mesh(const std::string& path);

// Legacy ASCII VTK export with the cell region scalar and optional nodal
// scalar fields (name -> one value per vertex).
void save_vtk(const Mesh& m, const std::string& path,
              const std::vector<std::pair<std::string, const std::vector<double>*>>& point_data = {},
              const std::vector<std::pair<std::string, const std::vector<double>*>>& cell_data = {});

// Discrete Hausdorff distance between two closed polylines (max over the
// vertices of either of the distance to the other polyline's segments).
double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

// Polygon helpers shared by mesh construction and data generation.
double polygon_area(const std::vector<Vec2>& poly);           // signed
bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly); // even-odd rule
double distance_to_polyline(Vec2 p, const std::vector<Vec2>& poly, bool closed);

// CCW polygonal circle whose segment length tracks the mesh spacing
// (at least 24 segments, always an even count).
std::vector<Vec2> circle_polygon(Vec2 center, double radius, double target_h);

}  // namespace thermoshape
