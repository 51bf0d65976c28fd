// Mesh text format and legacy VTK export.
//
// Text format:
//   nv nc nb ni
//   x y                 (nv vertex lines; full precision, reparses bit-exact)
//   v0 v1 v2 region     (nc cell lines)
//   v0 v1 tag           (nb boundary-edge lines)
//   v0 v1               (ni interface-edge lines, loop order)

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "thermoshape/mesh.hpp"

namespace thermoshape {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_mesh(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_mesh: cannot open '" + path + "' for writing");
    const auto iface = m.interface_edges();
    out << m.num_vertices() << ' ' << m.num_cells() << ' ' << m.bedge.size() << ' '
        << iface.size() << '\n';
    for (const Vec2& p : m.xy) out << fmt_double(p.x) << ' ' << fmt_double(p.y) << '\n';
    for (int c = 0; c < m.num_cells(); ++c)
        out << m.tri[c][0] << ' ' << m.tri[c][1] << ' ' << m.tri[c][2] << ' ' << m.region[c]
            << '\n';
    for (const auto& be : m.bedge) out << be[0] << ' ' << be[1] << ' ' << be[2] << '\n';
    for (const auto& ie : iface) out << ie[0] << ' ' << ie[1] << '\n';
    if (!out) throw IoError("save_mesh: write failed for '" + path + "'");
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_mesh: cannot open '" + path + "'");
    Mesh m;
    std::size_t nv = 0, nc = 0, nb = 0, ni = 0;
    if (!(in >> nv >> nc >> nb >> ni)) throw IoError("load_mesh: malformed header in '" + path + "'");
    m.xy.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        if (!(in >> m.xy[i].x >> m.xy[i].y))
            throw IoError("load_mesh: malformed vertex line " + std::to_string(i));
    }
    m.tri.resize(nc);
    m.region.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        if (!(in >> m.tri[c][0] >> m.tri[c][1] >> m.tri[c][2] >> m.region[c]))
            throw IoError("load_mesh: malformed cell line " + std::to_string(c));
    }
    m.bedge.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        if (!(in >> m.bedge[b][0] >> m.bedge[b][1] >> m.bedge[b][2]))
            throw IoError("load_mesh: malformed boundary-edge line " + std::to_string(b));
    }
    std::vector<std::array<int, 2>> iface(ni);
    for (std::size_t i = 0; i < ni; ++i) {
        if (!(in >> iface[i][0] >> iface[i][1]))
            throw IoError("load_mesh: malformed interface-edge line " + std::to_string(i));
    }

    // Re-chain the directed interface edges into loops.
    std::map<int, int> succ;
    for (const auto& e : iface) {
        if (!succ.emplace(e[0], e[1]).second)
            throw IoError("load_mesh: interface edges do not form simple loops");
    }
    std::map<int, bool> used;
    for (const auto& e : iface) used[e[0]] = false;
    for (const auto& e : iface) {
        if (used[e[0]]) continue;
        std::vector<int> loop;
        int v = e[0];
        do {
            if (used[v]) throw IoError("load_mesh: interface edges do not close into loops");
            used[v] = true;
            loop.push_back(v);
            auto it = succ.find(v);
            if (it == succ.end()) throw IoError("load_mesh: interface edge chain breaks at vertex " +
                                                std::to_string(v));
            v = it->second;
        } while (v != e[0]);
        m.loops.push_back(std::move(loop));
    }

    for (const Vec2& p : m.xy) {
        m.width = std::max(m.width, p.x);
        m.height = std::max(m.height, p.y);
    }
    return m;
}

void save_vtk(const Mesh& m, const std::string& path,
              const std::vector<std::pair<std::string, const std::vector<double>*>>& point_data,
              const std::vector<std::pair<std::string, const std::vector<double>*>>& cell_data) {
    std::ofstream out(path);
    if (!out) throw IoError("save_vtk: cannot open '" + path + "' for writing");
    out << "# vtk DataFile Version 3.0\n";
    out << "tissue sample mesh\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << m.num_vertices() << " double\n";
    for (const Vec2& p : m.xy) out << fmt_double(p.x) << ' ' << fmt_double(p.y) << " 0\n";
    out << "CELLS " << m.num_cells() << ' ' << 4 * m.num_cells() << '\n';
    for (const auto& t : m.tri) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << m.num_cells() << '\n';
    for (int c = 0; c < m.num_cells(); ++c) out << "5\n";

    out << "CELL_DATA " << m.num_cells() << '\n';
    out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
    for (int r : m.region) out << r << '\n';
    for (const auto& [name, values] : cell_data) {
        if (static_cast<int>(values->size()) != m.num_cells())
            throw IoError("save_vtk: cell field '" + name + "' has the wrong size");
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : *values) out << fmt_double(v) << '\n';
    }

    if (!point_data.empty()) {
        out << "POINT_DATA " << m.num_vertices() << '\n';
        for (const auto& [name, values] : point_data) {
            if (static_cast<int>(values->size()) != m.num_vertices())
                throw IoError("save_vtk: point field '" + name + "' has the wrong size");
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : *values) out << fmt_double(v) << '\n';
        }
    }
    if (!out) throw IoError("save_vtk: write failed for '" + path + "'");
}

}  // namespace thermoshape
