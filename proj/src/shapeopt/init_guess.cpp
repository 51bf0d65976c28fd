// Initial inclusion guess from the measured skin profile: the warmest spot
// on the skin sits roughly above the inclusion, so fit a degree-11
// polynomial to the profile (least squares on positions normalized to
// [-1, 1]) and drop a circle of the requested radius under its peak.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "thermoshape/shapeopt.hpp"

namespace thermoshape {

InitialGuess init_guess_from_profile(const BoundaryProfile& h, double width,
                                     double height, double depth, double r0,
                                     double target_h) {
    constexpr int kDegree = 11;
    const int n = static_cast<int>(h.s.size());
    if (n < kDegree + 1)
        throw ConfigError("init_guess_from_profile: need at least 12 samples");
    if (!(depth > 0.0) || !(r0 > 0.0))
        throw ConfigError("init_guess_from_profile: depth and r0 must be positive");

    InitialGuess out;

    double vmin = h.value[0], vmax = h.value[0];
    for (double v : h.value) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }

    if (vmax - vmin <= 1e-12 * std::max(1.0, std::abs(vmax))) {
        // Flat profile: no peak to find.
        out.fallback = true;
        out.peak_x = 0.5 * width;
    } else {
        const double s0 = h.s.front(), s1 = h.s.back();
        auto normalize = [&](double x) { return 2.0 * (x - s0) / (s1 - s0) - 1.0; };

        Eigen::MatrixXd V(n, kDegree + 1);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            const double xi = normalize(h.s[i]);
            double pw = 1.0;
            for (int d = 0; d <= kDegree; ++d) {
                V(i, d) = pw;
                pw *= xi;
            }
            y[i] = h.value[i];
        }
        const Eigen::VectorXd coef = V.colPivHouseholderQr().solve(y);

        // Arg-max over the central 90% of the skin (the fit oscillates near
        // the ends); dense scan, first maximum wins.
        const double lo = s0 + 0.05 * (s1 - s0), hi = s1 - 0.05 * (s1 - s0);
        const int kSamples = 2001;
        double best_x = lo, best_v = -1e300;
        for (int i = 0; i < kSamples; ++i) {
            const double x = lo + (hi - lo) * i / (kSamples - 1);
            const double xi = normalize(x);
            double v = 0.0, pw = 1.0;
            for (int d = 0; d <= kDegree; ++d) {
                v += coef[d] * pw;
                pw *= xi;
            }
            if (v > best_v) {
                best_v = v;
                best_x = x;
            }
        }
        out.peak_x = best_x;
    }

    // Keep the circle well inside the clearance band around the box boundary
    // so the first optimization steps are not throttled by the clearance
    // damping.
    const double margin = r0 + 4.0 * kBoundaryClearance;
    Vec2 center{std::clamp(out.peak_x, margin, width - margin),
                std::clamp(height - depth, margin, height - margin)};
    out.polygon = circle_polygon(center, r0, target_h);
    return out;
}

}  // namespace thermoshape
