// Reconstruction driver: state -> adjoint -> gradient -> Riesz field ->
// backtracking line search -> deform, with periodic bulk re-triangulation
// and three stopping rules (step exhaustion, iteration cap, stagnation of
// the combined cost J + J_LS).

#include <cmath>
#include <string>

#include "thermoshape/shapeopt.hpp"

namespace thermoshape {

namespace {

// One backtracking search at frozen rho.  Returns the accepted step
// (t_applied, possibly clearance-damped) or 0 when the search exhausts.
double line_search(Mesh& m, const PhysicalCoefficients& coef,
                   const BoundaryProfile& h, const VectorField& theta,
                   double t0, double j_pen_old, double rho, double t_min) {
    double t = t0;
    while (t >= t_min) {
        Mesh trial = m;
        const DeformOutcome out = deform(trial, theta, t);
        if (out.ok && out.t_applied > 0.0) {
            const ComplexField u = solve_complex_state(trial, coef, h);
            const ObjectiveReport rep = evaluate_objective(trial, u, h, rho);
            if (rep.penalized() < j_pen_old) {
                m = std::move(trial);
                return out.t_applied;
            }
        }
        t *= 0.5;
    }
    return 0.0;
}

}  // namespace

ReconstructionResult reconstruct(const Mesh& initial,
                                 const PhysicalCoefficients& coef,
                                 const BoundaryProfile& h, const OptConfig& cfg) {
    if (!(cfg.cb > 0.0) || !(cfg.cb <= 1.0))
        throw ConfigError("reconstruct: cb must lie in (0, 1]");
    if (!(cfg.s > 0.0)) throw ConfigError("reconstruct: step scale must be positive");
    if (cfg.balancing && !(cfg.beta > 1.0))
        throw ConfigError("reconstruct: balancing requires beta > 1");
    if (initial.loops.empty())
        throw ConfigError("reconstruct: initial mesh carries no inclusion");

    ReconstructionResult res;
    res.mesh = initial;
    res.termination = "K_max";

    int steps_since_remesh = 0;
    for (int k = 0; k < cfg.kmax; ++k) {
        bool remeshed = false;
        if (k > 0) {
            const MeshStats st = mesh_stats(res.mesh);
            if (steps_since_remesh >= cfg.remesh_every ||
                st.min_a_over_h < cfg.quality_floor) {
                res.mesh = remesh(res.mesh);
                ++res.remesh_count;
                steps_since_remesh = 0;
                remeshed = true;
            }
        }
        if (cfg.on_iteration) cfg.on_iteration(k, res.mesh);

        try {
            const ComplexTransmissionSystem sys(res.mesh, coef);
            const ComplexField u = sys.solve_state(h);
            ObjectiveReport rep = evaluate_objective(res.mesh, u, h, cfg.rho);
            if (cfg.balancing) rep.rho = balance_rho(cfg.beta, rep.J, rep.vol);

            const ComplexField p = sys.solve_adjoint(u);
            VectorField g = shape_gradient(res.mesh, coef, u, p);
            if (rep.rho != 0.0) accumulate(g, volume_gradient(res.mesh), rep.rho);

            const DescentField desc = riesz_descent_field(res.mesh, g, cfg.cb);
            const double gnorm = std::sqrt(desc.hnorm_sq);

            IterationRecord rec;
            rec.iter = k;
            rec.J = rep.J;
            rec.J_ls = rep.J_ls;
            rec.vol = rep.vol;
            rec.rho = rep.rho;
            rec.grad_norm = gnorm;
            rec.remeshed = remeshed;

            if (!(gnorm > 0.0) || !std::isfinite(gnorm)) {
                res.history.push_back(rec);
                res.termination = "t_min";
                break;
            }

            const double t0 = cfg.s * rep.J / gnorm;
            rec.t = line_search(res.mesh, coef, h, desc.theta, t0,
                                rep.penalized(), rep.rho, cfg.t_min);
            res.history.push_back(rec);

            if (rec.t == 0.0) {
                res.termination = "t_min";
                break;
            }
            ++steps_since_remesh;

            // Stagnation of the combined cost over the monitor window.
            const int n = static_cast<int>(res.history.size());
            if (n > cfg.stagnation_window) {
                const double past = res.history[n - 1 - cfg.stagnation_window].J +
                                    res.history[n - 1 - cfg.stagnation_window].J_ls;
                const double now = res.history[n - 1].J + res.history[n - 1].J_ls;
                const double rel = (past - now) / std::max(std::abs(past), 1e-300);
                if (rel < cfg.stagnation_rtol) {
                    res.termination = "stagnation";
                    break;
                }
            }
        } catch (const std::exception& e) {
            if (res.history.empty()) throw;  // nothing useful to hand back
            res.termination = std::string("error: ") + e.what();
            break;
        }
    }
    return res;
}

}  // namespace thermoshape
