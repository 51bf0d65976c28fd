#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "thermoshape/common.hpp"
#include "thermoshape/io.hpp"

namespace thermoshape {
namespace {

// %.17g: shortest text that round-trips an IEEE double exactly.
std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no CRLF surprises
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

double parse_double(const std::string& s, const std::string& path) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad numeric field '" + s + "' in " + path);
    }
}

}  // namespace

void write_profile_csv(const std::string& path, const BoundaryProfile& h) {
    if (h.s.size() != h.value.size())
        throw ConfigError("profile arrays disagree in length");
    auto out = open_out(path);
    out << "arc_position_m,temperature_C\n";
    for (size_t i = 0; i < h.s.size(); ++i)
        out << g17(h.s[i]) << ',' << g17(h.value[i]) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

BoundaryProfile read_profile_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("arc_position_m", 0) != 0)
        throw IoError("missing profile header in " + path);
    BoundaryProfile h;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2) throw IoError("bad profile row in " + path);
        h.s.push_back(parse_double(f[0], path));
        h.value.push_back(parse_double(f[1], path));
    }
    if (h.s.empty()) throw IoError("empty profile: " + path);
    return h;
}

void write_history_csv(const std::string& path,
                       const std::vector<IterationRecord>& history) {
    auto out = open_out(path);
    out << "iter,J,J_LS,vol,rho,t,grad_norm\n";
    for (const IterationRecord& r : history) {
        out << r.iter << ',' << g17(r.J) << ',' << g17(r.J_ls) << ','
            << g17(r.vol) << ',' << g17(r.rho) << ',' << g17(r.t) << ','
            << g17(r.grad_norm) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<IterationRecord> read_history_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("iter,", 0) != 0)
        throw IoError("missing history header in " + path);
    std::vector<IterationRecord> hist;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7) throw IoError("bad history row in " + path);
        IterationRecord r;
        r.iter = static_cast<int>(parse_double(f[0], path));
        r.J = parse_double(f[1], path);
        r.J_ls = parse_double(f[2], path);
        r.vol = parse_double(f[3], path);
        r.rho = parse_double(f[4], path);
        r.t = parse_double(f[5], path);
        r.grad_norm = parse_double(f[6], path);
        hist.push_back(r);
    }
    return hist;
}

void write_sensitivity_csv(const std::string& path,
                           const std::vector<SensitivityReport>& rows) {
    auto out = open_out(path);
    out << "mesh_level,h_max,min_aK,max_hK_over_aK,field_kind,t,fd_error,"
           "grad_norm\n";
    for (const SensitivityReport& r : rows) {
        const std::string prefix = std::to_string(r.mesh_level) + ',' +
                                   g17(r.stats.h_max) + ',' + g17(r.stats.min_a) +
                                   ',' + g17(r.stats.max_h_over_a) + ',' +
                                   r.field_kind + ',';
        if (r.fd.empty()) {
            out << prefix << "nan,nan," << g17(r.grad_norm) << '\n';
            continue;
        }
        for (const FdEntry& e : r.fd) {
            out << prefix << g17(e.t) << ','
                << (e.inverted ? "inverted" : g17(e.h1_error)) << ','
                << g17(r.grad_norm) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_cb_sweep_csv(const std::string& path,
                        const std::vector<CbEffectRow>& rows) {
    auto out = open_out(path);
    out << "delta,mesh_level,cb,theta_grad_norm,mat_deriv_norm\n";
    for (const CbEffectRow& r : rows) {
        out << g17(r.delta) << ',' << r.mesh_level << ',' << g17(r.cb) << ','
            << g17(r.theta_grad_norm) << ',' << g17(r.mat_deriv_norm) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_indicators_csv(const std::string& path, const Mesh& m,
                          const IndicatorSet& set) {
    if (static_cast<int>(set.eta.size()) != m.num_cells())
        throw ConfigError("indicator set does not match the mesh");
    auto out = open_out(path);
    out << "cell_id,region,eta,mu,xi,touches_interface\n";
    for (int c = 0; c < m.num_cells(); ++c) {
        out << c << ',' << m.region[c] << ',' << g17(set.eta[c]) << ','
            << g17(set.mu[c]) << ',' << g17(set.xi[c]) << ','
            << (set.touches_interface[c] ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_indicator_summary_json(const std::string& path,
                                  const IndicatorSet& set) {
    std::ostringstream os;
    os << "{\n"
       << "  \"eta_global\": " << g17(set.eta_global) << ",\n"
       << "  \"mu_global\": " << g17(set.mu_global) << ",\n"
       << "  \"xi_global\": " << g17(set.xi_global) << ",\n"
       << "  \"kappa\": " << (set.kappa_defined ? g17(set.kappa) : "null")
       << ",\n"
       << "  \"kappa_defined\": " << (set.kappa_defined ? "true" : "false")
       << ",\n"
       << "  \"num_cells\": " << set.eta.size() << "\n"
       << "}\n";
    write_text_file(path, os.str());
}

void write_vtk(const std::string& path, const Mesh& m,
               const std::vector<std::pair<std::string, std::vector<double>>>&
                   point_fields) {
    for (const auto& [name, values] : point_fields) {
        if (static_cast<int>(values.size()) != m.num_vertices())
            throw ConfigError("VTK field '" + name + "' does not match the mesh");
    }
    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\nthermoshape field snapshot\nASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << m.num_vertices() << " double\n";
    for (const Vec2& p : m.xy) out << g17(p.x) << ' ' << g17(p.y) << " 0\n";
    out << "CELLS " << m.num_cells() << ' ' << 4 * m.num_cells() << '\n';
    for (const auto& t : m.tri)
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << m.num_cells() << '\n';
    for (int c = 0; c < m.num_cells(); ++c) out << "5\n";
    out << "CELL_DATA " << m.num_cells() << "\nSCALARS region int 1\n"
        << "LOOKUP_TABLE default\n";
    for (int c = 0; c < m.num_cells(); ++c) out << m.region[c] << '\n';
    if (!point_fields.empty()) {
        out << "POINT_DATA " << m.num_vertices() << '\n';
        for (const auto& [name, values] : point_fields) {
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : values) out << g17(v) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in && !in.eof()) throw IoError("read failed: " + path);
    return ss.str();
}

}  // namespace thermoshape
