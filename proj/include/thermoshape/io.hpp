#pragma once
// Artifact writers (CSV / JSON / legacy VTK) and the run manifest.  All
// floating-point output uses %.17g so values round-trip through text exactly;
// re-running a manifest therefore reproduces every table bit-for-bit.

#include <string>
#include <utility>
#include <vector>

#include "thermoshape/datagen.hpp"
#include "thermoshape/estimators.hpp"
#include "thermoshape/fem.hpp"
#include "thermoshape/mesh.hpp"
#include "thermoshape/sensitivity.hpp"
#include "thermoshape/shapeopt.hpp"

namespace thermoshape {

// ---- CSV tables ------------------------------------------------------------
// Skin profile: header "arc_position_m,temperature_C".
void write_profile_csv(const std::string& path, const BoundaryProfile& h);
BoundaryProfile read_profile_csv(const std::string& path);

// Reconstruction history: header "iter,J,J_LS,vol,rho,t,grad_norm".
void write_history_csv(const std::string& path,
                       const std::vector<IterationRecord>& history);
std::vector<IterationRecord> read_history_csv(const std::string& path);

// Mesh-sensitivity table: one row per finite-difference entry (or one bare
// row per report when no quotients were requested).
void write_sensitivity_csv(const std::string& path,
                           const std::vector<SensitivityReport>& rows);

// Riesz-blend sweep: one row per (delta, mesh_level, cb).
void write_cb_sweep_csv(const std::string& path,
                        const std::vector<CbEffectRow>& rows);

// Per-cell indicators and the global summary.
void write_indicators_csv(const std::string& path, const Mesh& m,
                          const IndicatorSet& set);
void write_indicator_summary_json(const std::string& path,
                                  const IndicatorSet& set);

// Legacy ASCII VTK (triangles) with named nodal scalar fields.
void write_vtk(const std::string& path, const Mesh& m,
               const std::vector<std::pair<std::string, std::vector<double>>>&
                   point_fields);

// Text-file helpers; throw IoError on failure.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// ---- Run manifest ----------------------------------------------------------
// Everything needed to re-execute a command deterministically.  Output
// location is intentionally NOT part of the manifest: a re-run writes the
// same numbers to a different directory.
struct RunManifest {
    std::string command;  // forward | reconstruct | sensitivity | estimate | sweep
    ExperimentSpec spec;  // fully resolved, CLI overrides applied

    // Reconstruction settings (reconstruct / sweep / estimate guess).
    double cb = 0.5;
    double s = 0.5;
    int kmax = 200;
    bool balancing = false;
    double beta = 2.0;
    double rho = 0.0;
    double t_min = 1e-8;
    int remesh_every = 10;
    double quality_floor = 0.05;
    double stagnation_rtol = 1e-6;
    int stagnation_window = 5;

    // Sensitivity / sweep grids.
    int levels = 3;
    std::vector<double> cb_list;
    std::vector<double> delta_list;
    std::vector<double> r0_list;
};

std::string manifest_to_json(const RunManifest& mf);
RunManifest manifest_from_json(const std::string& text);  // ConfigError on bad input
void write_manifest(const std::string& path, const RunManifest& mf);
RunManifest read_manifest(const std::string& path);

// Experiment-spec JSON (same schema as the manifest's "experiment" block),
// for user-supplied spec files.
std::string spec_to_json_text(const ExperimentSpec& spec);
ExperimentSpec spec_from_json_text(const std::string& text);

}  // namespace thermoshape
