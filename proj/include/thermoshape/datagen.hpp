#pragma once
// Synthetic measurement pipeline: named experiment definitions, fine-mesh
// forward solves and seeded noise injection.  Measurements are generated on
// a fine non-nested mesh (P2 by default) so the inversion never sees its own
// discretization.

#include <cstdint>
#include <string>
#include <vector>

#include "thermoshape/fem.hpp"
#include "thermoshape/mesh.hpp"

namespace thermoshape {

struct ExperimentSpec {
    std::string name;
    double width = 0.09;
    double height = 0.03;
    std::vector<std::vector<Vec2>> exact_inclusions;
    PhysicalCoefficients coef;

    double delta = 0.01;       // noise std as a fraction of max |h|
    std::uint64_t seed = 1;
    double fine_h = 0.00075;   // measurement mesh spacing
    double coarse_h = 0.002;   // reconstruction mesh spacing
    int forward_order = 2;     // P2 measurement by default

    // Reconstruction-side defaults for this experiment.
    double guess_depth = 0.02;  // initial circle center depth below the skin
    double guess_r0 = 0.005;    // initial circle radius
    double step_scale = 4.0e5;  // line-search scale s (J is of order 1e-9)
};

// Built-in experiment catalog.  Throws ConfigError for unknown names.
ExperimentSpec builtin_experiment(const std::string& name);
std::vector<std::string> builtin_experiment_names();

// Exact skin trace on the fine mesh, before noise.
BoundaryProfile exact_measurement(const ExperimentSpec& spec);

// Noisy measurement: exact trace + delta * max|h| * z with iid standard
// normal z drawn from the seeded generator.  delta = 0 returns the exact
// trace (same samples, same positions).
BoundaryProfile generate_measurement(const ExperimentSpec& spec);

}  // namespace thermoshape
