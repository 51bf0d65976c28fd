#include <string>
#include <vector>

#include "json.hpp"
#include "thermoshape/common.hpp"
#include "thermoshape/io.hpp"

namespace thermoshape {
namespace {

using nlohmann::json;

json polygon_to_json(const std::vector<Vec2>& poly) {
    json arr = json::array();
    for (const Vec2& p : poly) arr.push_back({p.x, p.y});
    return arr;
}

std::vector<Vec2> polygon_from_json(const json& arr) {
    std::vector<Vec2> poly;
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2)
            throw ConfigError("manifest: polygon vertex must be [x, y]");
        poly.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return poly;
}

json spec_to_json(const ExperimentSpec& s) {
    json j;
    j["name"] = s.name;
    j["width"] = s.width;
    j["height"] = s.height;
    json incl = json::array();
    for (const auto& poly : s.exact_inclusions) incl.push_back(polygon_to_json(poly));
    j["exact_inclusions"] = incl;
    j["coefficients"] = {{"sigma1", s.coef.sigma1}, {"sigma0", s.coef.sigma0},
                         {"k1", s.coef.k1},         {"k0", s.coef.k0},
                         {"Q1", s.coef.Q1},         {"Q0", s.coef.Q0},
                         {"Tb", s.coef.Tb},         {"Ta", s.coef.Ta},
                         {"alpha", s.coef.alpha}};
    j["delta"] = s.delta;
    j["seed"] = s.seed;
    j["fine_h"] = s.fine_h;
    j["coarse_h"] = s.coarse_h;
    j["forward_order"] = s.forward_order;
    j["guess_depth"] = s.guess_depth;
    j["guess_r0"] = s.guess_r0;
    j["step_scale"] = s.step_scale;
    return j;
}

ExperimentSpec spec_from_json(const json& j) {
    ExperimentSpec s;
    s.name = j.at("name").get<std::string>();
    s.width = j.at("width").get<double>();
    s.height = j.at("height").get<double>();
    for (const auto& poly : j.at("exact_inclusions"))
        s.exact_inclusions.push_back(polygon_from_json(poly));
    const json& c = j.at("coefficients");
    s.coef.sigma1 = c.at("sigma1").get<double>();
    s.coef.sigma0 = c.at("sigma0").get<double>();
    s.coef.k1 = c.at("k1").get<double>();
    s.coef.k0 = c.at("k0").get<double>();
    s.coef.Q1 = c.at("Q1").get<double>();
    s.coef.Q0 = c.at("Q0").get<double>();
    s.coef.Tb = c.at("Tb").get<double>();
    s.coef.Ta = c.at("Ta").get<double>();
    s.coef.alpha = c.at("alpha").get<double>();
    s.delta = j.at("delta").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.fine_h = j.at("fine_h").get<double>();
    s.coarse_h = j.at("coarse_h").get<double>();
    s.forward_order = j.at("forward_order").get<int>();
    s.guess_depth = j.at("guess_depth").get<double>();
    s.guess_r0 = j.at("guess_r0").get<double>();
    s.step_scale = j.at("step_scale").get<double>();
    return s;
}

}  // namespace

std::string spec_to_json_text(const ExperimentSpec& spec) {
    return spec_to_json(spec).dump(2) + "\n";
}

ExperimentSpec spec_from_json_text(const std::string& text) {
    try {
        return spec_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment spec parse error: ") + e.what());
    }
}

std::string manifest_to_json(const RunManifest& mf) {
    json j;
    j["command"] = mf.command;
    j["experiment"] = spec_to_json(mf.spec);
    j["optimizer"] = {{"cb", mf.cb},
                      {"s", mf.s},
                      {"kmax", mf.kmax},
                      {"balancing", mf.balancing},
                      {"beta", mf.beta},
                      {"rho", mf.rho},
                      {"t_min", mf.t_min},
                      {"remesh_every", mf.remesh_every},
                      {"quality_floor", mf.quality_floor},
                      {"stagnation_rtol", mf.stagnation_rtol},
                      {"stagnation_window", mf.stagnation_window}};
    j["grids"] = {{"levels", mf.levels},
                  {"cb_list", mf.cb_list},
                  {"delta_list", mf.delta_list},
                  {"r0_list", mf.r0_list}};
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest parse error: ") + e.what());
    }
    try {
        RunManifest mf;
        mf.command = j.at("command").get<std::string>();
        mf.spec = spec_from_json(j.at("experiment"));
        const json& o = j.at("optimizer");
        mf.cb = o.at("cb").get<double>();
        mf.s = o.at("s").get<double>();
        mf.kmax = o.at("kmax").get<int>();
        mf.balancing = o.at("balancing").get<bool>();
        mf.beta = o.at("beta").get<double>();
        mf.rho = o.at("rho").get<double>();
        mf.t_min = o.at("t_min").get<double>();
        mf.remesh_every = o.at("remesh_every").get<int>();
        mf.quality_floor = o.at("quality_floor").get<double>();
        mf.stagnation_rtol = o.at("stagnation_rtol").get<double>();
        mf.stagnation_window = o.at("stagnation_window").get<int>();
        const json& g = j.at("grids");
        mf.levels = g.at("levels").get<int>();
        mf.cb_list = g.at("cb_list").get<std::vector<double>>();
        mf.delta_list = g.at("delta_list").get<std::vector<double>>();
        mf.r0_list = g.at("r0_list").get<std::vector<double>>();
        return mf;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest field error: ") + e.what());
    }
}

void write_manifest(const std::string& path, const RunManifest& mf) {
    write_text_file(path, manifest_to_json(mf));
}

RunManifest read_manifest(const std::string& path) {
    return manifest_from_json(read_text_file(path));
}

}  // namespace thermoshape
