#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "baselines.hpp"
#include "config.hpp"
#include "factor_model.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace ttd {

/// Iterates of the non-convex solver. The auxiliaries g_aux[n] and multipliers
/// y[n] live in the (small) unfolded-core space R_n x prod_{k!=n} R_k.
struct NctdState {
    Tensor g;                   // core, R_1 x ... x R_N
    std::vector<Matrix> u;      // factors, I_n x R_n, orthonormal columns
    std::vector<Matrix> g_aux;
    std::vector<Matrix> y;
    double mu = 0;
    int iter  = 0;
};

struct NctdResult {
    FactorModel model;
    Dims mode_ranks;
    std::vector<TraceRow> trace;
    int iterations = 0;
    bool converged = false;
};

/// Core update: closed-form blend of the data projection and the shifted
/// auxiliaries, G = [lambda*P(T) + sum_n refold(mu*G_n - Y_n, n)] / (lambda + N*mu).
inline Tensor nctd_update_core(const NctdState &s, const SolverConfig &cfg, const Tensor &t) {
    const Index order = t.order();
    Vector num        = cfg.lambda * project(t, s.u).data();
    for (Index n = 0; n < order; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        num += refold(s.mu * s.g_aux[i] - s.y[i], n, s.g.dims()).data();
    }
    return Tensor(s.g.dims(), num / (cfg.lambda + static_cast<double>(order) * s.mu));
}

/// Factor update: orthogonal Procrustes fit of U_n against the current core,
/// computed without materializing any Kronecker product.
inline Matrix nctd_update_factor(const NctdState &s, const Tensor &t, Index mode) {
    Matrix b = unfold(project_except(t, s.u, mode), mode) * unfold(s.g, mode).transpose();
    return procrustes(b);
}

/// Auxiliary update: singular value thresholding of the averaged mode-n core
/// unfolding at level 1/(mu + tau_n).
inline Matrix nctd_update_aux(const NctdState &s, const SolverConfig &cfg, Index mode) {
    const int order  = static_cast<int>(s.g.order());
    const double tau = cfg.tau_for(s.mu, order, static_cast<int>(mode));
    const double den = s.mu + tau;
    const std::size_t n = static_cast<std::size_t>(mode);
    Matrix arg = (s.mu * unfold(s.g, mode) + s.y[n] + tau * s.g_aux[n]) / den;
    return svt(arg, 1.0 / den);
}

namespace detail {

/// Truncate a model to the 1%-numerical ranks of its core: rotate each factor
/// by the leading core singular directions and project the core down.
inline void trim_model(FactorModel &model, Dims &mode_ranks) {
    const Index order = model.core.order();
    std::vector<Matrix> rot;
    mode_ranks.clear();
    for (Index n = 0; n < order; ++n) {
        SvdResult svd = thin_svd(unfold(model.core, n));
        Index r       = numerical_rank(svd.s);
        mode_ranks.push_back(r);
        rot.push_back(svd.u.leftCols(std::max<Index>(r, 1)));
    }
    model.core = project(model.core, rot);
    for (Index n = 0; n < order; ++n)
        model.factors[static_cast<std::size_t>(n)] *= rot[static_cast<std::size_t>(n)];
}

} // namespace detail

/// Non-convex core-trace-norm regularized decomposition: HOOI-style factor
/// updates interleaved with an ADMM on the small core. Factors start from a
/// seeded random orthonormal draw; the core-space ADMM variables start at zero.
/// Stops when the feasibility residual max_n||G_(n) - G_n||_F drops below
/// cfg.tol.
inline NctdResult nctd_decompose(const Tensor &t, const Dims &ranks,
                                 SolverConfig cfg  = SolverConfig::nctd_defaults(),
                                 std::uint64_t seed = 0) {
    detail::check_ranks(t, ranks, "nctd_decompose");
    const Index order = t.order();
    cfg.validate(static_cast<int>(order));

    NctdState s;
    s.g  = Tensor(ranks);
    s.mu = cfg.mu0;
    for (Index n = 0; n < order; ++n) {
        std::mt19937_64 eng = make_engine(seed, static_cast<std::uint64_t>(n));
        s.u.push_back(random_orthonormal(t.dim(n), ranks[static_cast<std::size_t>(n)], eng));
        const auto [lo, hi] = detail::split_extents(ranks, n);
        s.g_aux.push_back(Matrix::Zero(ranks[static_cast<std::size_t>(n)], lo * hi));
        s.y.push_back(Matrix::Zero(ranks[static_cast<std::size_t>(n)], lo * hi));
    }

    NctdResult result;
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 1; k <= cfg.max_iter; ++k) {
        Tensor g_new       = nctd_update_core(s, cfg, t);
        const double denom = s.g.norm() > 0 ? s.g.norm() : std::max(g_new.norm(), 1e-30);
        const double rel_change = (g_new.data() - s.g.data()).norm() / denom;
        s.g = std::move(g_new);

        // Jacobi across modes: every factor update reads the sweep's snapshot.
        for (int sweep = 0; sweep < cfg.factor_sweeps; ++sweep) {
            std::vector<Matrix> u_new(s.u.size());
            for (Index n = 0; n < order; ++n)
                u_new[static_cast<std::size_t>(n)] = nctd_update_factor(s, t, n);
            s.u = std::move(u_new);
        }

        double residual = 0;
        for (Index n = 0; n < order; ++n) {
            std::size_t i = static_cast<std::size_t>(n);
            s.g_aux[i]    = nctd_update_aux(s, cfg, n);
            Matrix gap    = unfold(s.g, n) - s.g_aux[i];
            s.y[i] += cfg.gamma * s.mu * gap;
            residual = std::max(residual, gap.norm());
        }

        s.iter = k;
        if (cfg.adaptive_mu) s.mu = std::min(cfg.rho * s.mu, cfg.mu_max);

        double objective = std::numeric_limits<double>::quiet_NaN();
        if (cfg.record_objective) {
            objective = 0.5 * cfg.lambda * (compose(s.g, s.u).data() - t.data()).squaredNorm();
            for (Index n = 0; n < order; ++n)
                objective += trace_norm(s.g_aux[static_cast<std::size_t>(n)]);
        }
        const double wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        result.trace.push_back({k, residual, rel_change, objective, wall_ms});

        if (residual < cfg.tol) {
            result.converged = true;
            break;
        }
    }
    result.iterations = s.iter;

    result.model      = {std::move(s.g), std::move(s.u)};
    result.mode_ranks = ranks;
    if (cfg.trim_output_ranks) detail::trim_model(result.model, result.mode_ranks);
    return result;
}

} // namespace ttd
