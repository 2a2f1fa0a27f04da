#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "config.hpp"
#include "ctd.hpp"
#include "io.hpp"
#include "nctd.hpp"
#include "synth.hpp"
#include "tensor.hpp"

namespace ttd {

enum class Method { hosvd, hooi, ctd, nctd };

inline const char *method_name(Method m) {
    switch (m) {
        case Method::hosvd: return "hosvd";
        case Method::hooi: return "hooi";
        case Method::ctd: return "ctd";
        case Method::nctd: return "nctd";
    }
    throw std::logic_error("method_name: bad enum");
}

inline Method parse_method(const std::string &s) {
    for (Method m : {Method::hosvd, Method::hooi, Method::ctd, Method::nctd})
        if (s == method_name(m)) return m;
    throw std::invalid_argument("unknown method '" + s + "' (hosvd|hooi|ctd|nctd)");
}

/// Flag-level overrides applied on top of a method's default SolverConfig.
struct SolverOverrides {
    std::optional<double> lambda, mu0, rho, gamma, tol;
    std::optional<int> max_iter;

    SolverConfig apply(SolverConfig base) const {
        if (lambda) base.lambda = *lambda;
        if (mu0) base.mu0 = *mu0;
        if (rho) base.rho = *rho;
        if (gamma) base.gamma = *gamma;
        if (tol) base.tol = *tol;
        if (max_iter) base.max_iter = *max_iter;
        return base;
    }

    SolverConfig for_method(Method m) const {
        return apply(m == Method::nctd ? SolverConfig::nctd_defaults()
                                       : SolverConfig::ctd_defaults());
    }
};

struct SolveOutput {
    FactorModel model;
    Dims est_ranks;
    std::vector<TraceRow> trace;
    int iterations = 0;
    bool converged = false;
    double wall_ms = 0;
};

namespace detail {

inline Dims core_ranks(const FactorModel &model) {
    Dims r;
    for (Index n = 0; n < model.core.order(); ++n)
        r.push_back(numerical_rank(unfold(model.core, n)));
    return r;
}

} // namespace detail

/// Run one decomposition. `ranks` is required for every method except CTD,
/// which estimates its ranks. Wall time covers the solve only.
inline SolveOutput solve(Method m, const Tensor &t, const Dims &ranks,
                         const SolverConfig &cfg, std::uint64_t seed) {
    SolveOutput out;
    const auto t0 = std::chrono::steady_clock::now();
    switch (m) {
        case Method::hosvd: {
            out.model     = hosvd(t, ranks);
            out.est_ranks = detail::core_ranks(out.model);
            const double err =
                std::sqrt(std::max(t.norm() * t.norm() - out.model.core.norm() * out.model.core.norm(), 0.0));
            out.trace.push_back({1, err, 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0});
            out.iterations = 1;
            out.converged  = true;
            break;
        }
        case Method::hooi: {
            out.model = hooi(t, ranks, cfg.max_iter, std::min(cfg.tol, 1e-6), &out.trace,
                             &out.converged);
            out.est_ranks  = detail::core_ranks(out.model);
            out.iterations = static_cast<int>(out.trace.size());
            break;
        }
        case Method::ctd: {
            CtdResult r    = ctd_decompose(t, cfg);
            out.model      = std::move(r.model);
            out.est_ranks  = std::move(r.mode_ranks);
            out.trace      = std::move(r.trace);
            out.iterations = r.iterations;
            out.converged  = r.converged;
            break;
        }
        case Method::nctd: {
            NctdResult r   = nctd_decompose(t, ranks, cfg, seed);
            out.model      = std::move(r.model);
            out.est_ranks  = std::move(r.mode_ranks);
            out.trace      = std::move(r.trace);
            out.iterations = r.iterations;
            out.converged  = r.converged;
            break;
        }
    }
    out.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

struct TrialOutcome {
    double rse   = 0;
    bool success = false;
    Dims est_ranks;
    int iters      = 0;
    double wall_ms = 0;
    bool converged = false;
    std::string status = "ok";
};

/// Deterministic per-trial seed stream.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base ^ (0xd1b54a32d192ed03ULL * (index + 1));
    return splitmix64(s);
}

/// Generate a problem from `spec` (its seed already set per trial), solve, and
/// score RSE against the clean tensor.
inline TrialOutcome run_trial(Method m, const SynthSpec &spec, Index given_rank,
                              const SolverOverrides &ov) {
    SynthProblem p = gen_tucker(spec);
    Dims ranks(spec.dims.size(), given_rank);
    SolveOutput s = solve(m, p.noisy, ranks, ov.for_method(m), spec.seed);

    TrialOutcome out;
    out.rse       = rse(s.model.reconstruct(), p.clean);
    out.success   = recovery_success(out.rse);
    out.est_ranks = std::move(s.est_ranks);
    out.iters     = s.iterations;
    out.wall_ms   = s.wall_ms;
    out.converged = s.converged;
    return out;
}

// ---------------------------------------------------------------------------
// Benchmark sweep (Table-1 style)

struct BenchmarkSpec {
    Dims dims;
    Index true_rank = 1;
    std::vector<Index> given_ranks;
    double delta         = 0;
    double outlier_ratio = 0;
    double outlier_range = 1.0;
    bool unit_scale      = false;
    std::vector<Method> methods;
    int repeats        = 1;
    std::uint64_t seed = 0;
    SolverOverrides overrides;
};

struct BenchRow {
    Method method;
    Index given_rank;
    int repeat;
    std::uint64_t seed;
    TrialOutcome outcome;
};

struct BenchAggregate {
    Method method;
    Index given_rank;
    double mean_rse     = 0;
    double success_frac = 0;
    double mean_iters   = 0;
    double mean_wall_ms = 0;
    int repeats         = 0;
};

struct BenchReport {
    BenchmarkSpec spec;
    std::vector<BenchRow> rows;
    std::vector<BenchAggregate> aggregates;
};

/// One row per (method, given rank, repeat); repeats re-seed the generator, so
/// all methods see identical problem instances within a repeat. A failing
/// trial is recorded with its error message in the status column and the sweep
/// continues.
inline BenchReport run_benchmark(const BenchmarkSpec &spec) {
    if (spec.repeats < 1) throw std::invalid_argument("run_benchmark: repeats must be >= 1");
    if (spec.methods.empty()) throw std::invalid_argument("run_benchmark: no methods");
    if (spec.given_ranks.empty()) throw std::invalid_argument("run_benchmark: no ranks");
    BenchReport report;
    report.spec = spec;
    for (Method m : spec.methods) {
        for (Index rank : spec.given_ranks) {
            BenchAggregate agg;
            agg.method     = m;
            agg.given_rank = rank;
            int ok         = 0;
            for (int rep = 0; rep < spec.repeats; ++rep) {
                SynthSpec synth;
                synth.dims          = spec.dims;
                synth.true_ranks    = Dims(spec.dims.size(), spec.true_rank);
                synth.noise_delta   = spec.delta;
                synth.outlier_ratio = spec.outlier_ratio;
                synth.outlier_range = spec.outlier_range;
                synth.unit_scale    = spec.unit_scale;
                synth.seed          = trial_seed(spec.seed, static_cast<std::uint64_t>(rep));
                BenchRow row{m, rank, rep, synth.seed, {}};
                try {
                    row.outcome = run_trial(m, synth, rank, spec.overrides);
                    ++ok;
                    agg.mean_rse += row.outcome.rse;
                    agg.success_frac += row.outcome.success ? 1.0 : 0.0;
                    agg.mean_iters += row.outcome.iters;
                    agg.mean_wall_ms += row.outcome.wall_ms;
                } catch (const std::exception &e) {
                    row.outcome.status = e.what();
                }
                report.rows.push_back(std::move(row));
            }
            agg.repeats = ok;
            if (ok > 0) {
                agg.mean_rse /= ok;
                agg.success_frac /= ok;
                agg.mean_iters /= ok;
                agg.mean_wall_ms /= ok;
            }
            report.aggregates.push_back(agg);
        }
    }
    return report;
}

namespace detail {

inline std::string join_dims(const Dims &d, char sep = 'x') {
    std::string s;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(d[i]);
    }
    return s;
}

inline std::string sanitize_status(std::string s) {
    for (char &c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

} // namespace detail

inline void write_benchmark_csv(std::ostream &os, const BenchReport &r) {
    write_csv_row(os, {"method", "dims", "true_rank", "given_rank", "delta", "outlier_ratio",
                       "repeat", "seed", "rse", "success", "est_ranks", "iters", "wall_ms",
                       "status"});
    const std::string dims  = detail::join_dims(r.spec.dims);
    const std::string delta = format_sci(r.spec.delta);
    const std::string ratio = format_sci(r.spec.outlier_ratio);
    for (const BenchRow &row : r.rows) {
        const bool ok = row.outcome.status == "ok";
        write_csv_row(os, {method_name(row.method), dims, std::to_string(r.spec.true_rank),
                           std::to_string(row.given_rank), delta, ratio,
                           std::to_string(row.repeat), std::to_string(row.seed),
                           ok ? format_sci(row.outcome.rse) : "",
                           ok ? (row.outcome.success ? "1" : "0") : "",
                           ok ? detail::join_dims(row.outcome.est_ranks, '|') : "",
                           ok ? std::to_string(row.outcome.iters) : "",
                           ok ? format_sci(row.outcome.wall_ms) : "",
                           detail::sanitize_status(row.outcome.status)});
    }
    for (const BenchAggregate &a : r.aggregates)
        write_csv_row(os, {method_name(a.method), dims, std::to_string(r.spec.true_rank),
                           std::to_string(a.given_rank), delta, ratio, "mean", "",
                           format_sci(a.mean_rse), format_sci(a.success_frac), "",
                           format_sci(a.mean_iters), format_sci(a.mean_wall_ms), "aggregate"});
}

// ---------------------------------------------------------------------------
// Phase-transition grid

enum class PhaseAxis { delta, ratio };

struct PhaseSpec {
    Dims dims;
    Index true_rank = 1;
    std::vector<Index> given_ranks;
    std::vector<double> axis_values; // noise deltas or outlier ratios
    PhaseAxis axis       = PhaseAxis::delta;
    double outlier_range = 1.0;
    bool unit_scale      = false;
    int repeats          = 1;
    std::uint64_t seed   = 0;
    SolverOverrides overrides;
};

struct PhaseCell {
    Index given_rank;
    double axis_value;
    double success_frac = 0;
    double mean_rse     = 0;
    int repeats         = 0;
};

struct PhaseReport {
    PhaseSpec spec;
    Method method;
    std::vector<PhaseCell> cells;
};

inline PhaseReport run_phase(const PhaseSpec &spec, Method method) {
    if (spec.repeats < 1) throw std::invalid_argument("run_phase: repeats must be >= 1");
    if (spec.given_ranks.empty() || spec.axis_values.empty())
        throw std::invalid_argument("run_phase: empty grid axis");
    PhaseReport report;
    report.spec   = spec;
    report.method = method;
    for (Index rank : spec.given_ranks) {
        for (double v : spec.axis_values) {
            PhaseCell cell{rank, v, 0, 0, 0};
            for (int rep = 0; rep < spec.repeats; ++rep) {
                SynthSpec synth;
                synth.dims       = spec.dims;
                synth.true_ranks = Dims(spec.dims.size(), spec.true_rank);
                if (spec.axis == PhaseAxis::delta)
                    synth.noise_delta = v;
                else
                    synth.outlier_ratio = v;
                synth.outlier_range = spec.outlier_range;
                synth.unit_scale    = spec.unit_scale;
                synth.seed          = trial_seed(spec.seed, static_cast<std::uint64_t>(rep));
                try {
                    TrialOutcome out = run_trial(method, synth, rank, spec.overrides);
                    cell.success_frac += out.success ? 1.0 : 0.0;
                    cell.mean_rse += out.rse;
                    ++cell.repeats;
                } catch (const std::exception &) {
                    // failed trial counts as unsuccessful
                }
            }
            if (cell.repeats > 0) {
                cell.success_frac /= spec.repeats;
                cell.mean_rse /= cell.repeats;
            }
            report.cells.push_back(cell);
        }
    }
    return report;
}

inline void write_phase_csv(std::ostream &os, const PhaseReport &r) {
    write_csv_row(os, {"method", "dims", "true_rank", "axis", "given_rank", "axis_value",
                       "success_fraction", "mean_rse", "repeats"});
    const std::string dims = detail::join_dims(r.spec.dims);
    const char *axis       = r.spec.axis == PhaseAxis::delta ? "delta" : "ratio";
    for (const PhaseCell &c : r.cells)
        write_csv_row(os, {method_name(r.method), dims, std::to_string(r.spec.true_rank), axis,
                           std::to_string(c.given_rank), format_sci(c.axis_value),
                           format_sci(c.success_frac), format_sci(c.mean_rse),
                           std::to_string(c.repeats)});
}

// ---------------------------------------------------------------------------
// Convergence traces

inline void write_trace_csv(std::ostream &os,
                            const std::vector<std::pair<Method, std::vector<TraceRow>>> &traces) {
    write_csv_row(os, {"method", "iter", "residual", "rel_change", "objective", "wall_ms"});
    for (const auto &[m, rows] : traces)
        for (const TraceRow &row : rows)
            write_csv_row(os, {method_name(m), std::to_string(row.iter),
                               format_sci(row.residual), format_sci(row.rel_change),
                               std::isnan(row.objective) ? "" : format_sci(row.objective),
                               format_sci(row.wall_ms)});
}

} // namespace ttd
