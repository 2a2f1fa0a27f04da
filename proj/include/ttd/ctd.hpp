#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "config.hpp"
#include "factor_model.hpp"
#include "linalg.hpp"
#include "tensor.hpp"

namespace ttd {

/// Iterates of the convex solver: consensus estimate x, one auxiliary tensor
/// and one multiplier tensor per mode, all sharing the input's extents.
struct CtdState {
    Tensor x;
    std::vector<Tensor> m;
    std::vector<Tensor> y;
    double mu = 0;
    int iter  = 0;
    std::vector<double> residual_history;
};

struct CtdResult {
    Tensor x;
    FactorModel model;
    Dims mode_ranks;
    std::vector<TraceRow> trace;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline SoftThresholded ctd_update_m_factored(const CtdState &s, const SolverConfig &cfg,
                                             Index mode) {
    const int order  = static_cast<int>(s.x.order());
    const double tau = cfg.tau_for(s.mu, order, static_cast<int>(mode));
    const double den = s.mu + tau;
    const std::size_t n = static_cast<std::size_t>(mode);
    Matrix arg = (s.mu * unfold(s.x, mode) - unfold(s.y[n], mode) + tau * unfold(s.m[n], mode)) / den;
    return svt_factored(arg, cfg.alpha(static_cast<int>(mode)) / den);
}

} // namespace detail

/// Auxiliary-block update: soft-thresholded SVD of the mode-n averaged iterate.
inline Tensor ctd_update_m(const CtdState &s, const SolverConfig &cfg, Index mode) {
    return refold(detail::ctd_update_m_factored(s, cfg, mode).value(), mode, s.x.dims());
}

/// Consensus update: elementwise weighted average of the auxiliaries,
/// multipliers, data term and previous iterate.
inline Tensor ctd_update_x(const CtdState &s, const SolverConfig &cfg, const Tensor &t) {
    const int order  = static_cast<int>(t.order());
    const double tau = cfg.tau_for(s.mu, order, order); // tau_{N+1}
    Vector num       = cfg.lambda * t.data() + tau * s.x.data();
    for (std::size_t n = 0; n < s.m.size(); ++n)
        num += s.mu * s.m[n].data() + s.y[n].data();
    return Tensor(t.dims(), num / (order * s.mu + cfg.lambda + tau));
}

/// Per-mode numerical ranks of the auxiliary tensors (1% singular value rule).
inline Dims ctd_estimate_ranks(const CtdState &s) {
    Dims ranks;
    for (std::size_t n = 0; n < s.m.size(); ++n)
        ranks.push_back(numerical_rank(unfold(s.m[n], static_cast<Index>(n))));
    return ranks;
}

/// Convex trace-norm regularized decomposition (Jacobi-parallel ADMM).
/// All blocks within one iteration read the previous iterate; duals then step
/// against the fresh values. Stops when both the feasibility residual relative
/// to ||t|| and the relative change of x fall below cfg.tol.
inline CtdResult ctd_decompose(const Tensor &t, SolverConfig cfg = SolverConfig::ctd_defaults()) {
    const Index order = t.order();
    cfg.validate(static_cast<int>(order));

    CtdState s;
    s.x  = Tensor(t.dims());
    s.m.assign(static_cast<std::size_t>(order), Tensor(t.dims()));
    s.y.assign(static_cast<std::size_t>(order), Tensor(t.dims()));
    s.mu = cfg.mu0;

    const double norm_t = std::max(frob_norm(t), 1e-30);
    CtdResult result;
    std::vector<SoftThresholded> last_svds(static_cast<std::size_t>(order));

    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 1; k <= cfg.max_iter; ++k) {
        std::vector<Tensor> m_new;
        m_new.reserve(static_cast<std::size_t>(order));
        for (Index n = 0; n < order; ++n) {
            last_svds[static_cast<std::size_t>(n)] = detail::ctd_update_m_factored(s, cfg, n);
            m_new.push_back(refold(last_svds[static_cast<std::size_t>(n)].value(), n, t.dims()));
        }
        Tensor x_new = ctd_update_x(s, cfg, t);

        double residual = 0;
        for (Index n = 0; n < order; ++n) {
            std::size_t i = static_cast<std::size_t>(n);
            s.y[i].data() += cfg.gamma * s.mu * (m_new[i].data() - x_new.data());
            residual = std::max(residual, (m_new[i].data() - x_new.data()).norm());
        }
        const double denom = s.x.norm() > 0 ? s.x.norm() : std::max(x_new.norm(), 1e-30);
        const double rel_change = (x_new.data() - s.x.data()).norm() / denom;

        s.m    = std::move(m_new);
        s.x    = std::move(x_new);
        s.iter = k;
        s.residual_history.push_back(residual);
        if (cfg.adaptive_mu) s.mu = std::min(cfg.rho * s.mu, cfg.mu_max);

        double objective = std::numeric_limits<double>::quiet_NaN();
        if (cfg.record_objective) {
            objective = 0.5 * cfg.lambda * (s.x.data() - t.data()).squaredNorm();
            for (Index n = 0; n < order; ++n)
                objective +=
                    cfg.alpha(static_cast<int>(n)) * last_svds[static_cast<std::size_t>(n)].s.sum();
        }
        const double wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        result.trace.push_back({k, residual, rel_change, objective, wall_ms});

        if (std::max(residual / norm_t, rel_change) < cfg.tol) {
            result.converged = true;
            break;
        }
        if (k > 20 && residual / norm_t > cfg.tol) {
            const double before = s.residual_history[static_cast<std::size_t>(k - 21)];
            if (before > 0 && residual > 10.0 * before)
                throw std::runtime_error(
                    "ctd_decompose: feasibility residual grew 10x over 20 iterations "
                    "(diverging; check mu/gamma/tau)");
        }
    }
    result.iterations = s.iter;

    result.mode_ranks = ctd_estimate_ranks(s);
    std::vector<Matrix> factors;
    for (Index n = 0; n < order; ++n) {
        const Index r = std::max<Index>(result.mode_ranks[static_cast<std::size_t>(n)], 1);
        factors.push_back(last_svds[static_cast<std::size_t>(n)].u.leftCols(r));
    }
    result.model = {project(s.x, factors), std::move(factors)};
    result.x     = std::move(s.x);
    return result;
}

} // namespace ttd
