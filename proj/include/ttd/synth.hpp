#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "factor_model.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace ttd {

/// Synthetic Tucker problem: clean = [[G; U_1..U_N]] with Gaussian core and
/// orthonormalized Gaussian factors, plus additive Gaussian noise and optional
/// sparse uniform outliers.
///
/// unit_scale rescales the clean tensor to unit-RMS entries before adding
/// noise, so noise_delta acts as a relative noise level. With it off, the raw
/// iid-Gaussian model makes the clean entries grow like prod(r_n)^{1/2} and
/// the same delta becomes a much smaller relative perturbation.
struct SynthSpec {
    Dims dims;
    Dims true_ranks;
    double noise_delta   = 0.0;
    double outlier_ratio = 0.0;
    double outlier_range = 1.0;
    std::uint64_t seed   = 0;
    bool unit_scale      = false;

    void validate() const {
        if (dims.empty() || dims.size() != true_ranks.size())
            throw std::invalid_argument("SynthSpec: dims/true_ranks order mismatch");
        for (std::size_t n = 0; n < dims.size(); ++n) {
            if (dims[n] < 1) throw std::invalid_argument("SynthSpec: extents must be >= 1");
            if (true_ranks[n] < 1 || true_ranks[n] > dims[n])
                throw std::invalid_argument("SynthSpec: ranks must lie in [1, I_n]");
        }
        if (noise_delta < 0) throw std::invalid_argument("SynthSpec: noise_delta must be >= 0");
        if (outlier_ratio < 0 || outlier_ratio > 1)
            throw std::invalid_argument("SynthSpec: outlier_ratio must lie in [0, 1]");
        if (outlier_range < 0)
            throw std::invalid_argument("SynthSpec: outlier_range must be >= 0");
    }
};

struct SynthProblem {
    Tensor clean;
    Tensor noisy;
    FactorModel truth;
};

/// Sub-stream ids; fixed so each consumer's draws are independent of the others.
namespace stream {
inline constexpr std::uint64_t core     = 0;
inline constexpr std::uint64_t factors  = 1; // + mode
inline constexpr std::uint64_t noise    = 100;
inline constexpr std::uint64_t outliers = 101;
} // namespace stream

/// Perturb exactly round(ratio * size) distinct entries by additive
/// uniform[-range, range] values; positions sampled without replacement.
inline Tensor add_outliers(const Tensor &t, double ratio, double range, std::uint64_t seed) {
    if (ratio < 0 || ratio > 1) throw std::invalid_argument("add_outliers: ratio in [0,1]");
    if (range < 0) throw std::invalid_argument("add_outliers: range must be >= 0");
    const Index count = static_cast<Index>(std::llround(ratio * static_cast<double>(t.size())));
    Tensor out = t;
    if (count == 0 || range == 0) return out;

    std::mt19937_64 eng = make_engine(seed, stream::outliers);
    // Partial Fisher-Yates over the index set gives the support.
    std::vector<Index> idx(static_cast<std::size_t>(t.size()));
    for (Index i = 0; i < t.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    std::uniform_real_distribution<double> value(-range, range);
    for (Index i = 0; i < count; ++i) {
        std::uniform_int_distribution<Index> pick(i, t.size() - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(eng))]);
        out[idx[static_cast<std::size_t>(i)]] += value(eng);
    }
    return out;
}

/// Deterministic per seed; same seed, same spec -> identical tensors.
inline SynthProblem gen_tucker(const SynthSpec &spec) {
    spec.validate();
    const Index order = static_cast<Index>(spec.dims.size());

    std::mt19937_64 core_eng = make_engine(spec.seed, stream::core);
    Tensor core(spec.true_ranks,
                gaussian_matrix(dim_product(spec.true_ranks), 1, core_eng).col(0));
    std::vector<Matrix> factors;
    for (Index n = 0; n < order; ++n) {
        std::mt19937_64 eng = make_engine(spec.seed, stream::factors + static_cast<std::uint64_t>(n));
        factors.push_back(random_orthonormal(spec.dims[static_cast<std::size_t>(n)],
                                             spec.true_ranks[static_cast<std::size_t>(n)], eng));
    }

    SynthProblem p;
    p.clean = compose(core, factors);
    if (spec.unit_scale) {
        const double rms = p.clean.norm() / std::sqrt(static_cast<double>(p.clean.size()));
        if (rms > 0) {
            p.clean.data() /= rms;
            core.data() /= rms;
        }
    }
    p.truth = {std::move(core), std::move(factors)};

    p.noisy = p.clean;
    if (spec.noise_delta > 0) {
        std::mt19937_64 eng = make_engine(spec.seed, stream::noise);
        p.noisy.data() += spec.noise_delta * gaussian_matrix(p.noisy.size(), 1, eng).col(0);
    }
    if (spec.outlier_ratio > 0)
        p.noisy = add_outliers(p.noisy, spec.outlier_ratio, spec.outlier_range, spec.seed);
    return p;
}

/// Relative square error ||x - t||_F / ||t||_F.
inline double rse(const Tensor &x, const Tensor &t) {
    if (x.dims() != t.dims()) throw std::invalid_argument("rse: extents mismatch");
    const double ref = t.norm();
    if (ref == 0) throw std::invalid_argument("rse: zero-norm reference");
    return (x.data() - t.data()).norm() / ref;
}

inline bool recovery_success(double rse_value) { return rse_value <= 1e-2; }

} // namespace ttd
