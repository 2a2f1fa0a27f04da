// Experiment CLI: generate synthetic problems, run single decompositions,
// benchmark sweeps, phase-transition grids and convergence traces. All file
// outputs are TNSR v1 tensors or CSV. Exit codes: 0 success/converged,
// 1 usage or input error, 2 solver stopped at the iteration cap.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ttd/experiment.hpp"
#include "ttd/io.hpp"
#include "ttd/synth.hpp"

namespace {

using ttd::Dims;
using ttd::Index;

struct CommonOpts {
    std::vector<Index> dims;
    Index true_rank = 5;
    std::vector<Index> ranks;
    double delta         = 0.0;
    double outlier_ratio = 0.0;
    double outlier_range = 1.0;
    bool unit_scale      = false;
    std::uint64_t seed   = 0;
    int repeats          = 1;
    std::string out;
    ttd::SolverOverrides ov;
};

void add_problem_flags(CLI::App *cmd, CommonOpts &o, bool need_dims) {
    auto *dims = cmd->add_option("--dims", o.dims, "tensor extents, e.g. 40,40,40")
                     ->delimiter(',');
    if (need_dims) dims->required();
    cmd->add_option("--true-rank", o.true_rank, "ground-truth Tucker rank per mode");
    cmd->add_option("--delta", o.delta, "Gaussian noise level");
    cmd->add_option("--outlier-ratio", o.outlier_ratio, "fraction of entries perturbed");
    cmd->add_option("--outlier-range", o.outlier_range, "outliers uniform in [-range,range]");
    cmd->add_flag("--unit-scale", o.unit_scale,
                  "normalize the clean tensor to unit-RMS entries (delta becomes relative)");
    cmd->add_option("--seed", o.seed, "RNG seed");
}

void add_solver_flags(CLI::App *cmd, CommonOpts &o) {
    cmd->add_option("--lambda", o.ov.lambda, "data-fit weight");
    cmd->add_option("--mu0", o.ov.mu0, "initial ADMM penalty");
    cmd->add_option("--rho", o.ov.rho, "penalty growth factor");
    cmd->add_option("--gamma", o.ov.gamma, "dual relaxation");
    cmd->add_option("--tol", o.ov.tol, "convergence tolerance");
    cmd->add_option("--max-iter", o.ov.max_iter, "iteration cap");
}

void add_config_flag(CLI::App *cmd, std::string &path) {
    cmd->add_option("--config", path,
                    "key=value file; any flag of this subcommand, CLI values win");
}

/// Expand `--config FILE` into --key=value tokens inserted in place, skipping
/// keys the command line already sets (precedence: CLI > file > default).
std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
        if (path.empty()) continue;

        std::vector<std::string> inject;
        for (const auto &[key, value] : ttd::read_kv(path)) {
            const std::string flag = "--" + key;
            const bool on_cli =
                std::any_of(args.begin(), args.end(), [&](const std::string &a) {
                    return a == flag || a.rfind(flag + "=", 0) == 0;
                });
            if (!on_cli) inject.push_back(flag + "=" + value);
        }
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(i), inject.begin(),
                    inject.end());
        break;
    }
    return args;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

Dims ranks_for(const CommonOpts &o, std::size_t order) {
    if (o.ranks.empty()) return {};
    if (o.ranks.size() == 1) return Dims(order, o.ranks[0]);
    if (o.ranks.size() != order)
        throw std::runtime_error("--ranks needs 1 value or one per mode");
    return Dims(o.ranks.begin(), o.ranks.end());
}

ttd::Tensor matrix_tensor(const ttd::Matrix &m) {
    // Column-major flattening coincides with the first-index-fastest layout.
    return ttd::Tensor({m.rows(), m.cols()},
                       Eigen::Map<const ttd::Vector>(m.data(), m.size()));
}

std::vector<ttd::Method> parse_methods(const std::vector<std::string> &names) {
    std::vector<ttd::Method> ms;
    for (const std::string &n : names) ms.push_back(ttd::parse_method(n));
    if (ms.empty()) throw std::runtime_error("no methods given");
    return ms;
}

int cmd_gen(const CommonOpts &o, const std::string &clean_out) {
    ttd::SynthSpec spec;
    spec.dims          = Dims(o.dims.begin(), o.dims.end());
    spec.true_ranks    = Dims(o.dims.size(), o.true_rank);
    spec.noise_delta   = o.delta;
    spec.outlier_ratio = o.outlier_ratio;
    spec.outlier_range = o.outlier_range;
    spec.unit_scale    = o.unit_scale;
    spec.seed          = o.seed;
    ttd::SynthProblem p = ttd::gen_tucker(spec);
    ttd::write_tnsr(o.out, p.noisy);
    if (!clean_out.empty()) ttd::write_tnsr(clean_out, p.clean);
    std::cout << "wrote " << o.out << " (" << ttd::detail::join_dims(spec.dims)
              << ", true rank " << o.true_rank << ", delta " << o.delta << ")\n";
    return 0;
}

int cmd_decompose(const CommonOpts &o, const std::string &input, const std::string &method_name,
                  const std::string &reference) {
    ttd::Tensor t = o.dims.empty()
                        ? ttd::read_tnsr(input)
                        : ttd::read_values(input, Dims(o.dims.begin(), o.dims.end()));
    ttd::Method method = ttd::parse_method(method_name);
    Dims ranks         = ranks_for(o, static_cast<std::size_t>(t.order()));
    if (method != ttd::Method::ctd && ranks.empty())
        throw std::runtime_error("--ranks is required for " + method_name);

    ttd::SolveOutput s = ttd::solve(method, t, ranks, o.ov.for_method(method), o.seed);

    const std::string prefix = o.out.empty() ? std::string("result") : o.out;
    for (std::size_t n = 0; n < s.model.factors.size(); ++n)
        ttd::write_tnsr(prefix + "_factor_" + std::to_string(n + 1) + ".tnsr",
                        matrix_tensor(s.model.factors[n]));
    ttd::write_tnsr(prefix + "_core.tnsr", s.model.core);
    ttd::write_tnsr(prefix + "_recon.tnsr", s.model.reconstruct());
    {
        auto os = open_out(prefix + "_trace.csv");
        ttd::write_trace_csv(os, {{method, s.trace}});
    }
    std::string rse_field;
    if (!reference.empty())
        rse_field = ttd::format_sci(ttd::rse(s.model.reconstruct(), ttd::read_tnsr(reference)));
    {
        auto os = open_out(prefix + "_summary.csv");
        ttd::write_csv_row(os, {"method", "rse", "est_ranks", "iterations", "wall_ms",
                                "converged"});
        ttd::write_csv_row(os, {method_name, rse_field,
                                ttd::detail::join_dims(s.est_ranks, '|'),
                                std::to_string(s.iterations), ttd::format_sci(s.wall_ms),
                                s.converged ? "1" : "0"});
    }
    std::cout << method_name << ": est_ranks " << ttd::detail::join_dims(s.est_ranks, '|')
              << ", iterations " << s.iterations
              << (rse_field.empty() ? "" : ", rse " + rse_field) << "\n";
    return s.converged ? 0 : 2;
}

int cmd_benchmark(const CommonOpts &o, const std::vector<std::string> &methods) {
    ttd::BenchmarkSpec spec;
    spec.dims          = Dims(o.dims.begin(), o.dims.end());
    spec.true_rank     = o.true_rank;
    spec.given_ranks   = o.ranks.empty() ? std::vector<Index>{o.true_rank} : o.ranks;
    spec.delta         = o.delta;
    spec.outlier_ratio = o.outlier_ratio;
    spec.outlier_range = o.outlier_range;
    spec.unit_scale    = o.unit_scale;
    spec.methods       = parse_methods(methods);
    spec.repeats       = o.repeats;
    spec.seed          = o.seed;
    spec.overrides     = o.ov;
    ttd::BenchReport report = ttd::run_benchmark(spec);
    if (o.out.empty()) {
        ttd::write_benchmark_csv(std::cout, report);
    } else {
        auto os = open_out(o.out);
        ttd::write_benchmark_csv(os, report);
    }
    return 0;
}

int cmd_phase(const CommonOpts &o, const std::string &method,
              const std::vector<double> &deltas, const std::vector<double> &ratios) {
    if (deltas.empty() == ratios.empty())
        throw std::runtime_error("phase: give exactly one of --deltas / --ratios");
    ttd::PhaseSpec spec;
    spec.dims          = Dims(o.dims.begin(), o.dims.end());
    spec.true_rank     = o.true_rank;
    spec.given_ranks   = o.ranks;
    spec.axis          = deltas.empty() ? ttd::PhaseAxis::ratio : ttd::PhaseAxis::delta;
    spec.axis_values   = deltas.empty() ? ratios : deltas;
    spec.outlier_range = o.outlier_range;
    spec.unit_scale    = o.unit_scale;
    spec.repeats       = o.repeats;
    spec.seed          = o.seed;
    spec.overrides     = o.ov;
    ttd::PhaseReport report = ttd::run_phase(spec, ttd::parse_method(method));
    if (o.out.empty()) {
        ttd::write_phase_csv(std::cout, report);
    } else {
        auto os = open_out(o.out);
        ttd::write_phase_csv(os, report);
    }
    return 0;
}

int cmd_trace(const CommonOpts &o, const std::vector<std::string> &methods) {
    ttd::SynthSpec synth;
    synth.dims          = Dims(o.dims.begin(), o.dims.end());
    synth.true_ranks    = Dims(o.dims.size(), o.true_rank);
    synth.noise_delta   = o.delta;
    synth.outlier_ratio = o.outlier_ratio;
    synth.outlier_range = o.outlier_range;
    synth.unit_scale    = o.unit_scale;
    synth.seed          = o.seed;
    ttd::SynthProblem p = ttd::gen_tucker(synth);
    Dims ranks          = ranks_for(o, synth.dims.size());
    if (ranks.empty()) ranks = Dims(synth.dims.size(), o.true_rank);

    std::vector<std::pair<ttd::Method, std::vector<ttd::TraceRow>>> traces;
    for (ttd::Method m : parse_methods(methods)) {
        ttd::SolveOutput s = ttd::solve(m, p.noisy, ranks, o.ov.for_method(m), o.seed);
        traces.emplace_back(m, std::move(s.trace));
    }
    if (o.out.empty()) {
        ttd::write_trace_csv(std::cout, traces);
    } else {
        auto os = open_out(o.out);
        ttd::write_trace_csv(os, traces);
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Tensor decomposition experiment harness"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string input, method, reference, clean_out, config_path;
    std::vector<std::string> methods;
    std::vector<double> deltas, ratios;

    auto *gen = app.add_subcommand("gen", "generate a synthetic low-rank tensor");
    add_problem_flags(gen, o, true);
    gen->add_option("--out", o.out, "output TNSR path")->required();
    gen->add_option("--clean-out", clean_out, "also write the noiseless tensor");
    add_config_flag(gen, config_path);

    auto *dec = app.add_subcommand("decompose", "decompose a tensor from file");
    dec->add_option("--input", input, "TNSR file (or value list with --dims)")->required();
    dec->add_option("--dims", o.dims, "extents when input is a plain value list")
        ->delimiter(',');
    dec->add_option("--method", method, "hosvd|hooi|ctd|nctd")->required();
    dec->add_option("--ranks", o.ranks, "given ranks (1 value or one per mode)")
        ->delimiter(',');
    dec->add_option("--seed", o.seed, "RNG seed (nctd factor init)");
    dec->add_option("--reference", reference, "clean tensor for RSE reporting");
    dec->add_option("--out", o.out, "output file prefix");
    add_solver_flags(dec, o);
    add_config_flag(dec, config_path);

    auto *bench = app.add_subcommand("benchmark", "RSE/time sweep over given ranks");
    add_problem_flags(bench, o, true);
    bench->add_option("--ranks", o.ranks, "given-rank list")->delimiter(',');
    bench->add_option("--methods", methods, "methods to run")->delimiter(',')->required();
    bench->add_option("--repeats", o.repeats, "trials per cell");
    bench->add_option("--out", o.out, "output CSV (default stdout)");
    add_solver_flags(bench, o);
    add_config_flag(bench, config_path);

    auto *phase = app.add_subcommand("phase", "success-fraction grid (rank x noise/outliers)");
    add_problem_flags(phase, o, true);
    phase->add_option("--method", method, "hosvd|hooi|ctd|nctd")->required();
    phase->add_option("--ranks", o.ranks, "given-rank axis")->delimiter(',')->required();
    phase->add_option("--deltas", deltas, "noise-level axis")->delimiter(',');
    phase->add_option("--ratios", ratios, "outlier-ratio axis")->delimiter(',');
    phase->add_option("--repeats", o.repeats, "trials per cell");
    phase->add_option("--out", o.out, "output CSV (default stdout)");
    add_solver_flags(phase, o);
    add_config_flag(phase, config_path);

    auto *trace = app.add_subcommand("trace", "per-iteration convergence curves");
    add_problem_flags(trace, o, true);
    trace->add_option("--ranks", o.ranks, "given ranks (default: true rank)")->delimiter(',');
    trace->add_option("--methods", methods, "methods to run")->delimiter(',')->required();
    trace->add_option("--out", o.out, "output CSV (default stdout)");
    add_solver_flags(trace, o);
    add_config_flag(trace, config_path);

    try {
        std::vector<std::string> args =
            expand_config(std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end()); // CLI11 consumes a reversed vector
        app.parse(std::move(args));
    } catch (const CLI::ParseError &e) {
        // Normalize all usage errors to exit code 1 (0 for --help).
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(o, clean_out);
        if (dec->parsed()) return cmd_decompose(o, input, method, reference);
        if (bench->parsed()) return cmd_benchmark(o, methods);
        if (phase->parsed()) return cmd_phase(o, method, deltas, ratios);
        if (trace->parsed()) return cmd_trace(o, methods);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
