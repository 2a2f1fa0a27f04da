#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ttd {

/// Per-iteration record surfaced as the solver trace CSV.
struct TraceRow {
    int iter;
    double residual;   // max_n feasibility residual, absolute
    double rel_change; // relative change of the primal estimate
    double objective;  // split objective (NaN when tracking is off)
    double wall_ms;
};

/// Shared solver parameters for the convex and non-convex ADMM solvers.
///
/// taus, when empty, are derived from the current penalty as
/// 1.01*mu*max(N/(2-gamma)-1, 0) + 1e-8, which strictly satisfies the
/// convergence condition tau_i > mu*(N/(2-gamma)-1).
struct SolverConfig {
    double lambda = 100.0; // data-fit weight
    double mu0    = 1.0;   // initial penalty
    double rho    = 1.05;  // penalty growth (adaptive mode)
    double mu_max = 1e10;
    double gamma  = 1.0; // dual relaxation, in (0,2)
    double tol    = 1e-5;
    int max_iter  = 500;

    std::vector<double> taus;    // explicit tau_1..tau_{N+1}; empty = auto
    std::vector<double> weights; // alpha_1..alpha_N, sum 1; empty = unweighted
    bool adaptive_mu = false;

    int factor_sweeps      = 1;    // non-convex solver: Procrustes sweeps per outer iter
    bool trim_output_ranks = true; // non-convex solver: truncate model to 1%-rank
    bool record_objective  = false;

    static SolverConfig ctd_defaults() { return {}; }

    static SolverConfig nctd_defaults() {
        SolverConfig c;
        c.mu0         = 1e-4;
        c.adaptive_mu = true;
        return c;
    }

    double tau_for(double mu, int order, int block) const {
        if (!taus.empty()) return taus[static_cast<std::size_t>(block)];
        return 1.01 * mu * std::max(order / (2.0 - gamma) - 1.0, 0.0) + 1e-8;
    }

    double alpha(int mode) const {
        return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(mode)];
    }

    void validate(int order) const {
        if (!(lambda > 0)) throw std::invalid_argument("SolverConfig: lambda must be > 0");
        if (!(mu0 > 0)) throw std::invalid_argument("SolverConfig: mu0 must be > 0");
        if (!(rho > 1.0) || rho > 1.1)
            throw std::invalid_argument("SolverConfig: rho must lie in (1.0, 1.1]");
        if (!(gamma > 0) || !(gamma < 2))
            throw std::invalid_argument("SolverConfig: gamma must lie in (0, 2)");
        if (!(tol > 0)) throw std::invalid_argument("SolverConfig: tol must be > 0");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
        if (!(mu_max >= mu0)) throw std::invalid_argument("SolverConfig: mu_max must be >= mu0");
        if (!taus.empty()) {
            if (static_cast<int>(taus.size()) != order + 1)
                throw std::invalid_argument("SolverConfig: need N+1 tau values");
            if (!adaptive_mu) {
                const double bound = mu0 * (order / (2.0 - gamma) - 1.0);
                for (double t : taus)
                    if (!(t > bound))
                        throw std::invalid_argument(
                            "SolverConfig: tau violates the fixed-mu convergence condition");
            }
        }
        if (!weights.empty()) {
            if (static_cast<int>(weights.size()) != order)
                throw std::invalid_argument("SolverConfig: need one weight per mode");
            double sum = 0;
            for (double w : weights) {
                if (w < 0) throw std::invalid_argument("SolverConfig: weights must be >= 0");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("SolverConfig: weights must sum to 1");
        }
        if (factor_sweeps < 1)
            throw std::invalid_argument("SolverConfig: factor_sweeps must be >= 1");
    }
};

} // namespace ttd
