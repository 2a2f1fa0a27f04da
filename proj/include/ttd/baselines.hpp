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

namespace detail {

inline void check_ranks(const Tensor &t, const Dims &ranks, const char *who) {
    if (static_cast<Index>(ranks.size()) != t.order())
        throw std::invalid_argument(std::string(who) + ": one rank per mode required");
    for (Index n = 0; n < t.order(); ++n) {
        Index r = ranks[static_cast<std::size_t>(n)];
        if (r < 1 || r > t.dim(n))
            throw std::invalid_argument(std::string(who) + ": rank out of range");
    }
}

} // namespace detail

/// Truncated HOSVD: U_n = leading R_n left singular vectors of the mode-n
/// unfolding, core = t projected onto the factor columns.
inline FactorModel hosvd(const Tensor &t, const Dims &ranks) {
    detail::check_ranks(t, ranks, "hosvd");
    std::vector<Matrix> factors;
    factors.reserve(static_cast<std::size_t>(t.order()));
    for (Index n = 0; n < t.order(); ++n) {
        SvdResult svd = thin_svd(unfold(t, n));
        factors.push_back(svd.u.leftCols(ranks[static_cast<std::size_t>(n)]));
    }
    return {project(t, factors), std::move(factors)};
}

/// HOOI: alternating least squares for the best rank-(R_1..R_N) approximation,
/// initialized from HOSVD. Stops when the relative change of the fit ||core||_F
/// drops below tol or after max_iter sweeps. When trace is given, one row per
/// sweep is appended; residual is the exact approximation error
/// sqrt(||t||^2 - ||core||^2), cheap because the factors are orthonormal.
inline FactorModel hooi(const Tensor &t, const Dims &ranks, int max_iter = 100,
                        double tol = 1e-6, std::vector<TraceRow> *trace = nullptr,
                        bool *converged = nullptr) {
    detail::check_ranks(t, ranks, "hooi");
    FactorModel model = hosvd(t, ranks);
    double fit        = frob_norm(model.core);
    const double nt2  = t.norm() * t.norm();
    if (converged) *converged = false;
    const auto t0 = std::chrono::steady_clock::now();
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        for (Index n = 0; n < t.order(); ++n) {
            Tensor partial = project_except(t, model.factors, n);
            SvdResult svd  = thin_svd(unfold(partial, n));
            model.factors[static_cast<std::size_t>(n)] =
                svd.u.leftCols(ranks[static_cast<std::size_t>(n)]);
        }
        model.core       = project(t, model.factors);
        const double now = frob_norm(model.core);
        const double rel = std::abs(now - fit) / std::max(fit, 1e-30);
        fit              = now;
        if (trace) {
            const double wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
            trace->push_back({sweep, std::sqrt(std::max(nt2 - now * now, 0.0)), rel,
                              std::numeric_limits<double>::quiet_NaN(), wall_ms});
        }
        if (rel < tol) {
            if (converged) *converged = true;
            break;
        }
    }
    return model;
}

} // namespace ttd
