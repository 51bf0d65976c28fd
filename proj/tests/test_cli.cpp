// End-to-end CLI tests.  Each test drives the installed binary through
// std::system and inspects exit codes, stderr markers and artifacts.  A
// downsized spec file (coarser measurement and reconstruction meshes than
// the built-in experiments) keeps every invocation fast while exercising
// the same code paths, including the spec-file loader itself.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "thermoshape/datagen.hpp"
#include "thermoshape/io.hpp"

using namespace thermoshape;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open ", p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

size_t count_lines(const std::string& text) {
    size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

struct CliFixture {
    fs::path root;
    fs::path spec_path;

    CliFixture() {
        root = fs::temp_directory_path() / "thermoshape_cli_test";
        fs::remove_all(root);
        fs::create_directories(root);

        // Downsized copy of the deep-circle experiment.
        ExperimentSpec spec = builtin_experiment("test2_deep_small_circle");
        spec.name = "test2_small_mesh";
        spec.fine_h = 0.002;
        spec.coarse_h = 0.003;
        spec_path = root / "spec.json";
        write_text_file(spec_path.string(), spec_to_json_text(spec));
    }

    static const CliFixture& get() {
        static CliFixture fx;
        return fx;
    }

    CliResult run(const std::string& args) const {
        static int serial = 0;
        const fs::path log = root / ("log_" + std::to_string(serial++) + ".txt");
        const std::string cmd = std::string(THERMOSHAPE_CLI_BIN) + " " + args +
                                " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        CliResult r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.output = read_file(log);
        return r;
    }
};

}  // namespace

TEST_CASE("cli: --help exits 0 and lists the commands") {
    const CliResult r = CliFixture::get().run("--help");
    CHECK(r.exit_code == 0);
    for (const char* cmd :
         {"forward", "reconstruct", "sensitivity", "estimate", "sweep"})
        CHECK_MESSAGE(r.output.find(cmd) != std::string::npos, cmd);
}

TEST_CASE("cli: configuration errors exit 2 with a machine-parsable line") {
    const CliFixture& fx = CliFixture::get();

    CliResult r = fx.run("--out " + (fx.root / "x").string());  // no command
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("kind=config") != std::string::npos);

    r = fx.run("forward --spec no_such_experiment --out " +
               (fx.root / "x").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("kind=config") != std::string::npos);

    r = fx.run("reconstruct --spec test2 --cb 1.5 --out " +
               (fx.root / "x").string());
    CHECK(r.exit_code == 2);

    r = fx.run("reconstruct --spec test2 --kmax 0 --out " +
               (fx.root / "x").string());
    CHECK(r.exit_code == 2);

    r = fx.run("forward --spec test1 --no-such-flag 1 --out " +
               (fx.root / "x").string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: unwritable output directory exits 4 as an I/O error") {
    const CliFixture& fx = CliFixture::get();
    const fs::path blocker = fx.root / "blocker";
    std::ofstream(blocker).put('\n');  // plain file; cannot become a directory
    const CliResult r = fx.run("forward --spec " + fx.spec_path.string() +
                               " --out " + (blocker / "sub").string());
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("kind=io") != std::string::npos);
}

TEST_CASE("cli: forward writes artifacts and replays bit-identically") {
    const CliFixture& fx = CliFixture::get();
    const fs::path a = fx.root / "fwd_a", b = fx.root / "fwd_b";

    CliResult r = fx.run("forward --spec " + fx.spec_path.string() + " --out " +
                         a.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    for (const char* f : {"measurement.csv", "forward.vtk", "run_manifest.json"})
        CHECK_MESSAGE(fs::exists(a / f), f);

    const std::string csv = read_file(a / "measurement.csv");
    CHECK(count_lines(csv) >= 10);

    r = fx.run("--manifest " + (a / "run_manifest.json").string() + " --out " +
               b.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    CHECK(read_file(b / "measurement.csv") == csv);
}

TEST_CASE("cli: reconstruct writes history and replays bit-identically") {
    const CliFixture& fx = CliFixture::get();
    const fs::path a = fx.root / "rec_a", b = fx.root / "rec_b";

    CliResult r = fx.run("reconstruct --spec " + fx.spec_path.string() +
                         " --kmax 2 --out " + a.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    for (const char* f : {"history.csv", "summary.json", "mesh_initial.vtk",
                          "mesh_final.vtk", "run_manifest.json"})
        CHECK_MESSAGE(fs::exists(a / f), f);

    const std::string hist = read_file(a / "history.csv");
    CHECK(count_lines(hist) == 3);  // header + two iterations
    CHECK(hist.rfind("iter,", 0) == 0);

    const std::string summary = read_file(a / "summary.json");
    CHECK(summary.find("\"termination\": \"K_max\"") != std::string::npos);
    CHECK(summary.find("\"hausdorff\"") != std::string::npos);

    // A subcommand that contradicts the manifest is refused.
    r = fx.run("forward --manifest " + (a / "run_manifest.json").string() +
               " --out " + b.string());
    CHECK(r.exit_code == 2);

    r = fx.run("--manifest " + (a / "run_manifest.json").string() + " --out " +
               b.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    CHECK(read_file(b / "history.csv") == hist);
}

TEST_CASE("cli: estimate writes the indicator table and summary") {
    const CliFixture& fx = CliFixture::get();
    const fs::path out = fx.root / "est";
    const CliResult r = fx.run("estimate --spec " + fx.spec_path.string() +
                               " --out " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);

    const std::string csv = read_file(out / "indicators.csv");
    CHECK(csv.rfind("cell_id,", 0) == 0);
    CHECK(count_lines(csv) >= 100);  // one row per cell on the coarse mesh

    const std::string js = read_file(out / "indicators_summary.json");
    for (const char* key : {"eta_global", "mu_global", "xi_global", "kappa"})
        CHECK_MESSAGE(js.find(key) != std::string::npos, key);
}

TEST_CASE("cli: sensitivity writes the stability and blend-sweep tables") {
    const CliFixture& fx = CliFixture::get();
    const fs::path out = fx.root / "sens";
    const CliResult r = fx.run("sensitivity --spec " + fx.spec_path.string() +
                               " --levels 1 --out " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);

    // Header + {smooth, rough} rows, each expanded over the three built-in
    // finite-difference step sizes.
    const std::string sens = read_file(out / "sensitivity.csv");
    CHECK(count_lines(sens) == 7);
    CHECK(sens.rfind("mesh_level,", 0) == 0);

    const std::string sweep = read_file(out / "cb_sweep.csv");
    // Default grids: 5 blend values x 2 noise levels on one level.
    CHECK(count_lines(sweep) == 11);
}

TEST_CASE("cli: sweep fans out reconstructions and tabulates them") {
    const CliFixture& fx = CliFixture::get();
    const fs::path out = fx.root / "sweep";
    const CliResult r =
        fx.run("sweep --spec " + fx.spec_path.string() +
               " --r0-grid 0.003,0.004 --kmax 1 --out " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);

    const std::string table = read_file(out / "sweep_table.csv");
    CHECK(table.rfind("r0,delta,cb,", 0) == 0);
    CHECK(count_lines(table) == 3);  // header + one row per grid point

    int summaries = 0;
    for (const auto& entry : fs::recursive_directory_iterator(out))
        if (entry.path().filename() == "summary.json") ++summaries;
    CHECK(summaries == 2);
}
