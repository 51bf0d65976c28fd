// thermoshape: reproducible experiment runner.
//
// Commands
//   forward      fine-mesh data generation: measurement CSV + field VTK
//   reconstruct  inverse loop: history.csv, mesh snapshots, summary.json
//   sensitivity  mesh-stability tables: sensitivity.csv + cb_sweep.csv
//   estimate     a-posteriori indicators: indicators.csv + summary JSON
//   sweep        batch of reconstructions over r0 / delta / cb grids
//
// Every run writes run_manifest.json with all effective parameters; re-running
// via --manifest reproduces the numeric outputs exactly.  Exit codes: 0 ok,
// 2 configuration, 3 numerical failure, 4 I/O.  THERMOSHAPE_THREADS caps the
// number of concurrent sweep jobs.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "thermoshape/common.hpp"
#include "thermoshape/datagen.hpp"
#include "thermoshape/estimators.hpp"
#include "thermoshape/fem.hpp"
#include "thermoshape/io.hpp"
#include "thermoshape/mesh.hpp"
#include "thermoshape/sensitivity.hpp"
#include "thermoshape/shapeopt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thermoshape;

namespace {

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

fs::path prepare_out_dir(const std::string& out) {
    if (out.empty()) throw ConfigError("--out is required");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory '" + out + "': " + ec.message());
    return fs::path(out);
}

ExperimentSpec resolve_spec(const std::string& name_or_path) {
    // Short aliases for the built-in catalog.
    static const std::vector<std::pair<std::string, std::string>> aliases = {
        {"test1", "test1_shallow_circle"}, {"test2", "test2_deep_small_circle"},
        {"test3a", "test3_nonconvex_a"},   {"test3b", "test3_nonconvex_b"},
        {"test3c", "test3_nonconvex_c"},   {"test3d", "test3_nonconvex_d"},
        {"multi2", "multi2_circles"}};
    for (const auto& [alias, full] : aliases)
        if (name_or_path == alias) return builtin_experiment(full);
    for (const std::string& full : builtin_experiment_names())
        if (name_or_path == full) return builtin_experiment(full);
    if (fs::exists(name_or_path))
        return spec_from_json_text(read_text_file(name_or_path));
    throw ConfigError("unknown experiment '" + name_or_path +
                      "' (not a built-in name and not a spec file)");
}

OptConfig opt_config_of(const RunManifest& mf) {
    OptConfig cfg;
    cfg.cb = mf.cb;
    cfg.s = mf.s;
    cfg.kmax = mf.kmax;
    cfg.balancing = mf.balancing;
    cfg.beta = mf.beta;
    cfg.rho = mf.rho;
    cfg.t_min = mf.t_min;
    cfg.remesh_every = mf.remesh_every;
    cfg.quality_floor = mf.quality_floor;
    cfg.stagnation_rtol = mf.stagnation_rtol;
    cfg.stagnation_window = mf.stagnation_window;
    return cfg;
}

std::vector<Vec2> loop_polygon(const Mesh& m, const std::vector<int>& loop) {
    std::vector<Vec2> poly;
    poly.reserve(loop.size());
    for (int v : loop) poly.push_back(m.xy[v]);
    return poly;
}

// Max over reconstructed loops of the Hausdorff distance to the closest
// exact inclusion (greedy centroid matching).  NaN when loop counts differ.
double hausdorff_vs_exact(const Mesh& m,
                          const std::vector<std::vector<Vec2>>& exact) {
    if (m.loops.size() != exact.size() || exact.empty())
        return std::numeric_limits<double>::quiet_NaN();
    auto centroid = [](const std::vector<Vec2>& poly) {
        Vec2 c{0.0, 0.0};
        for (const Vec2& p : poly) { c.x += p.x; c.y += p.y; }
        c.x /= static_cast<double>(poly.size());
        c.y /= static_cast<double>(poly.size());
        return c;
    };
    std::vector<bool> used(exact.size(), false);
    double worst = 0.0;
    for (const auto& loop : m.loops) {
        const std::vector<Vec2> poly = loop_polygon(m, loop);
        const Vec2 c = centroid(poly);
        int best = -1;
        double best_d = 0.0;
        for (size_t i = 0; i < exact.size(); ++i) {
            if (used[i]) continue;
            const Vec2 e = centroid(exact[i]);
            const double d = std::hypot(c.x - e.x, c.y - e.y);
            if (best < 0 || d < best_d) { best = static_cast<int>(i); best_d = d; }
        }
        used[best] = true;
        worst = std::max(worst, hausdorff_distance(poly, exact[best]));
    }
    return worst;
}

int thread_budget(int jobs) {
    int n = 1;
    if (const char* env = std::getenv("THERMOSHAPE_THREADS")) {
        try {
            n = std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            throw ConfigError(std::string("THERMOSHAPE_THREADS is not a number: ") + env);
        }
    }
    return std::min(n, std::max(1, jobs));
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

void run_forward(const RunManifest& mf, const fs::path& out) {
    const ExperimentSpec& spec = mf.spec;
    const Mesh fine = build_rect_mesh(spec.width, spec.height, spec.fine_h,
                                      spec.exact_inclusions);
    auto [field, profile] = solve_forward_real(fine, spec.coef, spec.forward_order);
    if (spec.delta > 0.0) {  // same draw order as generate_measurement
        const double scale = spec.delta * profile.max_abs();
        Rng rng(spec.seed);
        for (double& v : profile.value) v += scale * rng.normal();
    }
    write_profile_csv((out / "measurement.csv").string(), profile);
    write_vtk((out / "forward.vtk").string(), fine, {{"temperature", field}});
    write_manifest((out / "run_manifest.json").string(), mf);
}

void run_reconstruct(const RunManifest& mf, const fs::path& out) {
    const ExperimentSpec& spec = mf.spec;
    const BoundaryProfile h = generate_measurement(spec);
    const InitialGuess guess =
        init_guess_from_profile(h, spec.width, spec.height, spec.guess_depth,
                                spec.guess_r0, spec.coarse_h);
    Mesh m0 = build_rect_mesh(spec.width, spec.height, spec.coarse_h,
                              {guess.polygon});
    write_vtk((out / "mesh_initial.vtk").string(), m0, {});

    const OptConfig cfg = opt_config_of(mf);
    ReconstructionResult result = reconstruct(m0, spec.coef, h, cfg);

    write_history_csv((out / "history.csv").string(), result.history);
    {
        ComplexField u = solve_complex_state(result.mesh, spec.coef, h);
        write_vtk((out / "mesh_final.vtk").string(), result.mesh,
                  {{"u_re", u.re}, {"u_im", u.im}});
    }

    json summary;
    summary["termination"] = result.termination;
    summary["iterations"] = result.history.size();
    summary["remesh_count"] = result.remesh_count;
    if (!result.history.empty()) {
        const IterationRecord& last = result.history.back();
        summary["final"] = {{"J", last.J},
                            {"J_LS", last.J_ls},
                            {"vol", last.vol},
                            {"rho", last.rho},
                            {"penalized", last.J + last.rho * last.vol}};
    }
    const double hd = hausdorff_vs_exact(result.mesh, spec.exact_inclusions);
    if (std::isnan(hd))
        summary["hausdorff"] = nullptr;
    else
        summary["hausdorff"] = hd;
    summary["initial_guess"] = {{"peak_x", guess.peak_x},
                                {"fallback", guess.fallback}};
    write_text_file((out / "summary.json").string(), summary.dump(2) + "\n");
    write_manifest((out / "run_manifest.json").string(), mf);
}

void run_sensitivity(const RunManifest& mf, const fs::path& out) {
    const ExperimentSpec& spec = mf.spec;
    const Mesh coarse = build_rect_mesh(spec.width, spec.height, spec.coarse_h,
                                        spec.exact_inclusions);
    const BoundaryProfile h = exact_measurement(spec);
    const std::vector<double> t_list = {1e-4, 1e-5, 1e-6};
    const auto reports =
        stability_sweep(coarse, spec.coef, h, mf.levels, t_list, spec.seed);
    write_sensitivity_csv((out / "sensitivity.csv").string(), reports);

    std::vector<double> cb_list = mf.cb_list;
    if (cb_list.empty()) cb_list = {1e-5, 1e-3, 1e-1, 0.5, 1.0};
    std::vector<double> delta_list = mf.delta_list;
    if (delta_list.empty()) delta_list = {0.0, spec.delta};
    const auto rows = cb_effect_sweep(coarse, spec.coef, h, mf.levels, cb_list,
                                      delta_list, spec.seed);
    write_cb_sweep_csv((out / "cb_sweep.csv").string(), rows);
    write_manifest((out / "run_manifest.json").string(), mf);
}

void run_estimate(const RunManifest& mf, const fs::path& out) {
    const ExperimentSpec& spec = mf.spec;
    const BoundaryProfile h = generate_measurement(spec);
    const InitialGuess guess =
        init_guess_from_profile(h, spec.width, spec.height, spec.guess_depth,
                                spec.guess_r0, spec.coarse_h);
    const Mesh m = build_rect_mesh(spec.width, spec.height, spec.coarse_h,
                                   {guess.polygon});
    ComplexTransmissionSystem sys(m, spec.coef);
    const ComplexField u = sys.solve_state(h);
    const ComplexField p = sys.solve_adjoint(u);
    const IndicatorSet set = compute_indicators(m, spec.coef, u, p, h);
    write_indicators_csv((out / "indicators.csv").string(), m, set);
    write_indicator_summary_json((out / "indicators_summary.json").string(), set);
    write_manifest((out / "run_manifest.json").string(), mf);
}

void run_sweep(const RunManifest& mf, const fs::path& out) {
    std::vector<double> r0s = mf.r0_list;
    if (r0s.empty()) r0s = {mf.spec.guess_r0};
    std::vector<double> deltas = mf.delta_list;
    if (deltas.empty()) deltas = {mf.spec.delta};
    std::vector<double> cbs = mf.cb_list;
    if (cbs.empty()) cbs = {mf.cb};

    struct Job {
        RunManifest mf;
        fs::path dir;
        std::string tag;
    };
    std::vector<Job> jobs;
    char tag[128];
    for (double r0 : r0s)
        for (double delta : deltas)
            for (double cb : cbs) {
                RunManifest sub = mf;
                sub.command = "reconstruct";
                sub.spec.guess_r0 = r0;
                sub.spec.delta = delta;
                sub.cb = cb;
                sub.r0_list.clear();
                sub.delta_list.clear();
                sub.cb_list.clear();
                std::snprintf(tag, sizeof(tag), "r0=%g_delta=%g_cb=%g", r0,
                              delta, cb);
                jobs.push_back({std::move(sub), out / tag, tag});
            }

    std::atomic<size_t> next{0};
    std::mutex failures_mutex;
    std::vector<std::string> failures;
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            try {
                prepare_out_dir(jobs[i].dir.string());
                run_reconstruct(jobs[i].mf, jobs[i].dir);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failures_mutex);
                failures.push_back(jobs[i].tag + std::string(": ") + e.what());
            }
        }
    };
    const int nthreads = thread_budget(static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (!failures.empty())
        throw NumericalError("sweep job failed: " + failures.front());

    // Ranking table across the grid.
    std::string table = "r0,delta,cb,final_J,final_penalized,hausdorff,termination,iterations\n";
    for (const Job& job : jobs) {
        const json s = json::parse(read_text_file((job.dir / "summary.json").string()));
        char row[256];
        const double J = s["final"]["J"].get<double>();
        const double pen = s["final"]["penalized"].get<double>();
        const double hd = s["hausdorff"].is_null()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : s["hausdorff"].get<double>();
        std::snprintf(row, sizeof(row), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,",
                      job.mf.spec.guess_r0, job.mf.spec.delta, job.mf.cb, J,
                      pen, hd);
        table += row;
        table += s["termination"].get<std::string>();
        table += ',' + std::to_string(s["iterations"].get<long>()) + '\n';
    }
    write_text_file((out / "sweep_table.csv").string(), table);
    write_manifest((out / "run_manifest.json").string(), mf);
}

void dispatch(const RunManifest& mf, const fs::path& out) {
    if (mf.command == "forward") return run_forward(mf, out);
    if (mf.command == "reconstruct") return run_reconstruct(mf, out);
    if (mf.command == "sensitivity") return run_sensitivity(mf, out);
    if (mf.command == "estimate") return run_estimate(mf, out);
    if (mf.command == "sweep") return run_sweep(mf, out);
    throw ConfigError("unknown command '" + mf.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermoshape: inclusion reconstruction from skin temperature"};
    app.fallthrough();

    std::string spec_name = "test1_shallow_circle";
    std::string manifest_path;
    std::string out_dir;
    RunManifest defaults;  // carries the built-in optimizer defaults
    double r0 = -1.0;      // negative: keep the experiment default
    double delta = -1.0;
    double s = defaults.s, cb = defaults.cb, beta = defaults.beta, rho = defaults.rho;
    std::uint64_t seed = 0;
    bool seed_set = false, balancing = false;
    int kmax = defaults.kmax, levels = defaults.levels;
    std::vector<double> r0_list, delta_list, cb_list;

    app.add_option("--spec", spec_name,
                   "built-in experiment (test1, test2, test3a..d, multi2 or "
                   "full name) or a JSON spec file");
    app.add_option("--manifest", manifest_path,
                   "re-run a recorded run_manifest.json (overrides --spec and "
                   "parameter flags)");
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--r0", r0, "initial guess radius [m]");
    app.add_option("--delta", delta, "measurement noise level (fraction)");
    app.add_option("--cb", cb, "Riesz blend c_b in (0,1]");
    app.add_option("--beta", beta, "balancing factor (enables volume penalty)");
    auto* rho_opt = app.add_option("--rho", rho, "fixed volume weight");
    auto* beta_opt = app.get_option_no_throw("--beta");
    app.add_option("--s", s, "line-search step scale");
    app.add_option("--kmax", kmax, "iteration cap");
    auto* seed_opt = app.add_option("--seed", seed, "noise seed");
    app.add_option("--levels", levels, "refinement levels for sensitivity");
    app.add_option("--r0-grid", r0_list, "sweep grid of guess radii")
        ->delimiter(',');
    app.add_option("--delta-grid", delta_list, "sweep grid of noise levels")
        ->delimiter(',');
    app.add_option("--cb-grid", cb_list, "sweep grid of Riesz blends")
        ->delimiter(',');

    CLI::App* cmd_forward = app.add_subcommand("forward", "generate measurement data");
    CLI::App* cmd_reconstruct = app.add_subcommand("reconstruct", "run the inverse loop");
    CLI::App* cmd_sensitivity = app.add_subcommand("sensitivity", "mesh-stability tables");
    CLI::App* cmd_estimate = app.add_subcommand("estimate", "a-posteriori indicators");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "batch reconstructions over grids");
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::fprintf(stderr, "thermoshape: kind=config message=\"%s\"\n", e.what());
        return 2;
    }
    seed_set = seed_opt->count() > 0;

    try {
        RunManifest mf;
        if (!manifest_path.empty()) {
            mf = read_manifest(manifest_path);
            std::string requested;
            for (CLI::App* c : {cmd_forward, cmd_reconstruct, cmd_sensitivity,
                                cmd_estimate, cmd_sweep})
                if (c->parsed()) requested = c->get_name();
            if (!requested.empty() && requested != mf.command)
                throw ConfigError("command '" + requested +
                                  "' conflicts with manifest command '" +
                                  mf.command + "'");
        } else {
            std::string command;
            for (CLI::App* c : {cmd_forward, cmd_reconstruct, cmd_sensitivity,
                                cmd_estimate, cmd_sweep})
                if (c->parsed()) command = c->get_name();
            if (command.empty())
                throw ConfigError(
                    "no command given (forward | reconstruct | sensitivity | "
                    "estimate | sweep)");
            mf.command = command;
            mf.spec = resolve_spec(spec_name);
            if (r0 >= 0.0) mf.spec.guess_r0 = r0;
            if (delta >= 0.0) mf.spec.delta = delta;
            if (seed_set) mf.spec.seed = seed;
            mf.cb = cb;
            mf.s = s;
            mf.kmax = kmax;
            mf.beta = beta;
            mf.rho = rho;
            // --beta opts into the balancing rule; --rho pins a fixed weight.
            mf.balancing = beta_opt->count() > 0 && rho_opt->count() == 0;
            mf.levels = levels;
            mf.r0_list = r0_list;
            mf.delta_list = delta_list;
            mf.cb_list = cb_list;
            if (mf.cb <= 0.0 || mf.cb > 1.0)
                throw ConfigError("--cb must lie in (0, 1]");
            if (mf.kmax < 1) throw ConfigError("--kmax must be positive");
            if (mf.levels < 1) throw ConfigError("--levels must be positive");
        }
        const fs::path out = prepare_out_dir(out_dir);
        dispatch(mf, out);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "thermoshape: kind=config message=\"%s\"\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "thermoshape: kind=numerical message=\"%s\"\n", e.what());
        return 3;
    } catch (const IoError& e) {
        std::fprintf(stderr, "thermoshape: kind=io message=\"%s\"\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "thermoshape: kind=numerical message=\"%s\"\n", e.what());
        return 3;
    }
}
