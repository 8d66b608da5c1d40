#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "config.hpp"
#include "io.hpp"

namespace bregquant::cli {

// Exit codes shared by all subcommands.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_not_converged = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

/// The only environment knob: assignment fan-out for the 2D pipeline.
inline int threads_from_env() {
    const char* v = std::getenv("BREGQUANT_THREADS");
    if (!v) return 1;
    const long n = std::strtol(v, nullptr, 10);
    if (n < 1) return 1;
    return static_cast<int>(std::min<long>(n, 256));
}

namespace detail {

inline std::string out_path(const CommonArgs& a, const std::string& name) {
    return (std::filesystem::path(a.out_dir) / name).string();
}

inline void ensure_out_dir(const CommonArgs& a) {
    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + a.out_dir);
}

inline SolveResult solve_1d(const ParsedRun& run) {
    if (run.r == 2.0)
        return lloyd(*run.fn, *run.density, run.n, run.quad, run.solver);
    return weighted_lloyd(*run.fn, *run.density, run.n, run.r, run.quad, run.solver);
}

inline nlohmann::json run_report(const ParsedRun& run, const SolveResult& res) {
    const auto rep = distortion(*run.fn, *run.density, res.codebook, run.r, run.quad);
    nlohmann::json j;
    j["n"] = run.n;
    j["r"] = run.r;
    j["seed"] = run.seed;
    j["distortion"] = rep.g;
    j["e_rn"] = std::pow(rep.g, 1.0 / run.r);
    j["codes"] = res.codebook.codes;
    j["cuts"] = res.cuts.cuts;
    j["trace"] = trace_json(res.trace);
    j["verification"] =
        verification_json(verify_all(*run.fn, *run.density, res.codebook, run.r, run.quad));
    return j;
}

} // namespace detail

/// Solve, then write the codebook CSV and the JSON run report. Artifacts are
/// written even when the iteration stops at max_iter, so a stalled run can
/// still be inspected; the exit code tells the two apart.
inline int cmd_quantize(const CommonArgs& a) {
    try {
        ParsedRun run = parse_config_file(a.config_path);
        if (run.two_d) throw ConfigError("quantize: config describes a 2D run");
        if (a.seed) run.seed = *a.seed;
        const SolveResult res = detail::solve_1d(run);
        detail::ensure_out_dir(a);
        write_codebook_csv(detail::out_path(a, run.out.codebook),
                           codebook_rows(*run.fn, *run.density, res.codebook, res.cuts, run.r,
                                         run.quad));
        write_json(detail::out_path(a, run.out.report), detail::run_report(run, res));
        if (!res.trace.converged) {
            std::cerr << "quantize: stopped at max_iter without meeting tolerances\n";
            return exit_not_converged;
        }
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "quantize: " << e.what() << '\n';
        return exit_error;
    }
}

/// Audit an existing codebook against a config: residuals, identity gaps,
/// uniqueness verdict, Hessian data. Verdicts are data, so any codebook the
/// pipeline can evaluate exits 0; only unreadable or out-of-domain input
/// fails.
inline int cmd_verify(const CommonArgs& a) {
    try {
        ParsedRun run = parse_config_file(a.config_path);
        if (run.two_d) throw ConfigError("verify: config describes a 2D run");
        const std::string cb_path = run.codebook_in.empty()
                                        ? detail::out_path(a, run.out.codebook)
                                        : run.codebook_in;
        Codebook1D cb{read_codebook_csv(cb_path)};
        cb.validate(*run.fn);
        const auto ver = verify_all(*run.fn, *run.density, cb, run.r, run.quad);
        detail::ensure_out_dir(a);
        nlohmann::json j;
        j["codebook"] = cb.codes;
        j["n"] = cb.codes.size();
        j["r"] = run.r;
        j["verification"] = verification_json(ver);
        write_json(detail::out_path(a, run.out.verification), j);
        std::cout << "residual " << num(ver.stationarity_sup_residual) << ", verdict "
                  << to_string(ver.trushkin) << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << '\n';
        return exit_error;
    }
}

/// Quantize, then export the per-cell density estimate mass / width at the
/// code positions: the piecewise-constant reconstruction of the input law.
inline int cmd_reconstruct(const CommonArgs& a) {
    try {
        ParsedRun run = parse_config_file(a.config_path);
        if (run.two_d) throw ConfigError("reconstruct: config describes a 2D run");
        if (a.seed) run.seed = *a.seed;
        const SolveResult res = detail::solve_1d(run);
        detail::ensure_out_dir(a);
        write_reconstruction_csv(detail::out_path(a, run.out.reconstruction),
                                 codebook_rows(*run.fn, *run.density, res.codebook, res.cuts,
                                               run.r, run.quad));
        if (!res.trace.converged) {
            std::cerr << "reconstruct: stopped at max_iter without meeting tolerances\n";
            return exit_not_converged;
        }
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "reconstruct: " << e.what() << '\n';
        return exit_error;
    }
}

/// Sample the 2D source, run the empirical fixed point, export codes and
/// per-sample assignments. One seed drives both the draw and the
/// initialization unless the samples block pins its own.
inline int cmd_quantize2d(const CommonArgs& a) {
    try {
        ParsedRun run = parse_config_file(a.config_path);
        if (!run.two_d) throw ConfigError("quantize2d: config describes a 1D run");
        if (a.seed) run.seed = *a.seed;
        const auto samples = sample_2d(run.sample_desc, run.sample_count,
                                       run.sample_seed.value_or(run.seed));
        Lloyd2DConfig cfg = run.solver2d;
        cfg.threads = threads_from_env();
        const auto res = lloyd2d(*run.dv2, samples, run.n, run.seed, cfg);
        detail::ensure_out_dir(a);
        write_codes2d_csv(detail::out_path(a, run.out.codes), res.codebook, res.assignment);
        write_assignments_csv(detail::out_path(a, run.out.assignments), samples, res.assignment);
        nlohmann::json j;
        j["n"] = run.n;
        j["seed"] = run.seed;
        j["samples"] = run.sample_count;
        j["distortion"] = res.assignment.distortion;
        j["trace"] = trace2d_json(res.trace);
        write_json(detail::out_path(a, run.out.report), j);
        if (!res.trace.converged) {
            std::cerr << "quantize2d: stopped at max_iter without a stable partition\n";
            return exit_not_converged;
        }
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "quantize2d: " << e.what() << '\n';
        return exit_error;
    }
}

} // namespace bregquant::cli
