// Built-in experiment catalog and the measurement generator.
//
// The circle centers/radii of the two calibration cases and the coefficient
// table are fixed by the physical model; the non-convex target family uses
// polar curves r(phi) = r0 (1 + a cos(m phi)).

#include <cmath>

#include "thermoshape/common.hpp"
#include "thermoshape/datagen.hpp"

namespace thermoshape {

namespace {

std::vector<Vec2> polar_polygon(Vec2 center, double r0, double amp, int lobes,
                                double target_h) {
    const double rmax = r0 * (1.0 + std::abs(amp));
    int n = std::max(32, static_cast<int>(
                             std::ceil(2.0 * M_PI * rmax / (0.4 * target_h))));
    if (n % 2) ++n;
    std::vector<Vec2> poly;
    poly.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double phi = 2.0 * M_PI * i / n;
        const double r = r0 * (1.0 + amp * std::cos(lobes * phi));
        poly.push_back({center.x + r * std::cos(phi), center.y + r * std::sin(phi)});
    }
    return poly;
}

}  // namespace

std::vector<std::string> builtin_experiment_names() {
    return {"test1_shallow_circle", "test2_deep_small_circle",
            "test3_nonconvex_a",    "test3_nonconvex_b",
            "test3_nonconvex_c",    "test3_nonconvex_d",
            "multi2_circles"};
}

ExperimentSpec builtin_experiment(const std::string& name) {
    ExperimentSpec spec;
    spec.name = name;

    if (name == "test1_shallow_circle") {
        spec.exact_inclusions = {
            circle_polygon({0.045, 0.020}, 0.005, spec.fine_h)};
        spec.guess_r0 = 0.005;
    } else if (name == "test2_deep_small_circle") {
        spec.exact_inclusions = {
            circle_polygon({0.045, 0.015}, 0.003, spec.fine_h)};
        spec.guess_r0 = 0.003;
    } else if (name == "test3_nonconvex_a") {
        spec.exact_inclusions = {
            polar_polygon({0.045, 0.015}, 0.004, 0.20, 2, spec.fine_h)};
        spec.guess_r0 = 0.004;
    } else if (name == "test3_nonconvex_b") {
        spec.exact_inclusions = {
            polar_polygon({0.045, 0.015}, 0.004, 0.20, 3, spec.fine_h)};
        spec.guess_r0 = 0.004;
    } else if (name == "test3_nonconvex_c") {
        spec.exact_inclusions = {
            polar_polygon({0.045, 0.015}, 0.004, 0.15, 4, spec.fine_h)};
        spec.guess_r0 = 0.004;
    } else if (name == "test3_nonconvex_d") {
        spec.exact_inclusions = {
            polar_polygon({0.045, 0.015}, 0.004, 0.25, 5, spec.fine_h)};
        spec.guess_r0 = 0.004;
    } else if (name == "multi2_circles") {
        spec.exact_inclusions = {
            circle_polygon({0.030, 0.018}, 0.004, spec.fine_h),
            circle_polygon({0.060, 0.015}, 0.003, spec.fine_h)};
        spec.guess_r0 = 0.004;
    } else {
        throw ConfigError("builtin_experiment: unknown experiment '" + name + "'");
    }
    return spec;
}

BoundaryProfile exact_measurement(const ExperimentSpec& spec) {
    if (!(spec.fine_h < spec.coarse_h))
        throw ConfigError(
            "exact_measurement: fine_h must be smaller than coarse_h "
            "(non-nested meshes guard against inverse crimes)");
    if (spec.delta < 0.0)
        throw ConfigError("exact_measurement: delta must be nonnegative");
    const Mesh fine = build_rect_mesh(spec.width, spec.height, spec.fine_h,
                                      spec.exact_inclusions);
    return solve_forward_real(fine, spec.coef, spec.forward_order).second;
}

BoundaryProfile generate_measurement(const ExperimentSpec& spec) {
    BoundaryProfile prof = exact_measurement(spec);
    if (spec.delta == 0.0) return prof;
    const double scale = spec.delta * prof.max_abs();
    Rng rng(spec.seed);
    for (double& v : prof.value) v += scale * rng.normal();
    return prof;
}

}  // namespace thermoshape
