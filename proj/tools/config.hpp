#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bregquant/bregquant.hpp"

namespace bregquant::cli {

using nlohmann::json;

namespace detail {

inline void expect_keys(const json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known)
            throw ConfigError("config: unknown field '" + it.key() + "' in " + where);
    }
}

inline const json& require(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key))
        throw ConfigError("config: missing field '" + std::string(key) + "' in " + where);
    return obj.at(key);
}

inline double get_num(const json& obj, const std::string& where, const char* key) {
    const json& v = require(obj, where, key);
    if (!v.is_number())
        throw ConfigError("config: field '" + std::string(key) + "' in " + where +
                          " must be a number");
    return v.get<double>();
}

inline double get_num_or(const json& obj, const std::string& where, const char* key,
                         double fallback) {
    return obj.contains(key) ? get_num(obj, where, key) : fallback;
}

inline std::uint64_t get_uint_or(const json& obj, const std::string& where, const char* key,
                                 std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned())
        throw ConfigError("config: field '" + std::string(key) + "' in " + where +
                          " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline std::string get_str(const json& obj, const std::string& where, const char* key) {
    const json& v = require(obj, where, key);
    if (!v.is_string())
        throw ConfigError("config: field '" + std::string(key) + "' in " + where +
                          " must be a string");
    return v.get<std::string>();
}

inline bool get_bool_or(const json& obj, const std::string& where, const char* key,
                        bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError("config: field '" + std::string(key) + "' in " + where +
                          " must be a boolean");
    return v.get<bool>();
}

inline std::array<double, 2> get_vec2(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("config: " + where + " must be a 2-element number array");
    return {v[0].get<double>(), v[1].get<double>()};
}

inline std::array<std::array<double, 2>, 2> get_mat2(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2)
        throw ConfigError("config: " + where + " must be a 2x2 number matrix");
    return {get_vec2(v[0], where), get_vec2(v[1], where)};
}

} // namespace detail

inline BregmanFunction parse_divergence(const json& o) {
    using detail::expect_keys;
    using detail::get_num;
    const std::string kind = detail::get_str(o, "divergence", "kind");
    if (kind == "squared_norm") {
        expect_keys(o, "divergence", {"kind"});
        return BregmanFunction::squared_norm();
    }
    if (kind == "norm_like") {
        expect_keys(o, "divergence", {"kind", "lambda"});
        return BregmanFunction::norm_like(get_num(o, "divergence", "lambda"));
    }
    if (kind == "itakura_saito") {
        expect_keys(o, "divergence", {"kind"});
        return BregmanFunction::itakura_saito();
    }
    if (kind == "kullback_leibler") {
        expect_keys(o, "divergence", {"kind"});
        return BregmanFunction::kullback_leibler();
    }
    if (kind == "logistic") {
        expect_keys(o, "divergence", {"kind"});
        return BregmanFunction::logistic();
    }
    if (kind == "soft_plus") {
        expect_keys(o, "divergence", {"kind", "a"});
        return BregmanFunction::soft_plus(get_num(o, "divergence", "a"));
    }
    if (kind == "soft_butterfly") {
        expect_keys(o, "divergence", {"kind", "a"});
        return BregmanFunction::soft_butterfly(get_num(o, "divergence", "a"));
    }
    if (kind == "exponential") {
        expect_keys(o, "divergence", {"kind", "a"});
        return BregmanFunction::exponential(get_num(o, "divergence", "a"));
    }
    throw ConfigError("config: unknown divergence kind '" + kind + "'");
}

/// Only bounded-support densities make sense here: the exact-quadrature
/// pipeline integrates over the full support. Unbounded sources enter as
/// truncated_gaussian the way the reference tables are produced.
inline Density1D parse_distribution(const json& o) {
    using detail::expect_keys;
    using detail::get_num;
    using detail::get_num_or;
    const std::string kind = detail::get_str(o, "distribution", "kind");
    if (kind == "uniform") {
        expect_keys(o, "distribution", {"kind", "a", "b"});
        return Density1D::uniform(get_num(o, "distribution", "a"), get_num(o, "distribution", "b"));
    }
    if (kind == "truncated_gaussian") {
        expect_keys(o, "distribution", {"kind", "mean", "sigma", "tail"});
        return truncate_support(Density1D::gaussian(get_num_or(o, "distribution", "mean", 0.0),
                                                    get_num_or(o, "distribution", "sigma", 1.0)),
                                get_num_or(o, "distribution", "tail", 1e-12));
    }
    throw ConfigError("config: unknown distribution kind '" + kind + "'");
}

inline SolverConfig parse_solver(const json& o) {
    detail::expect_keys(o, "solver",
                        {"max_iter", "code_tol", "residual_tol", "damping", "init"});
    SolverConfig cfg;
    cfg.max_iter = static_cast<int>(detail::get_num_or(o, "solver", "max_iter", cfg.max_iter));
    cfg.code_tol = detail::get_num_or(o, "solver", "code_tol", cfg.code_tol);
    cfg.residual_tol = detail::get_num_or(o, "solver", "residual_tol", cfg.residual_tol);
    cfg.damping = detail::get_num_or(o, "solver", "damping", cfg.damping);
    if (o.contains("init")) {
        const json& init = o.at("init");
        if (init.is_string() && init.get<std::string>() == "quantiles") {
            cfg.init = InitRule::Quantiles;
        } else if (init.is_array()) {
            cfg.init = InitRule::UserSupplied;
            for (const auto& v : init) {
                if (!v.is_number())
                    throw ConfigError("config: solver init array must hold numbers");
                cfg.init_codes.push_back(v.get<double>());
            }
        } else {
            throw ConfigError("config: solver init must be \"quantiles\" or a code array");
        }
    }
    return cfg;
}

inline QuadratureConfig parse_quadrature(const json& o) {
    detail::expect_keys(o, "quadrature", {"abs_tol", "rel_tol", "max_depth"});
    QuadratureConfig q;
    q.abs_tol = detail::get_num_or(o, "quadrature", "abs_tol", q.abs_tol);
    q.rel_tol = detail::get_num_or(o, "quadrature", "rel_tol", q.rel_tol);
    q.max_depth = static_cast<int>(detail::get_num_or(o, "quadrature", "max_depth", q.max_depth));
    return q;
}

inline Divergence2D parse_divergence2d(const json& o) {
    const std::string kind = detail::get_str(o, "divergence2d", "kind");
    if (kind == "squared_norm") {
        detail::expect_keys(o, "divergence2d", {"kind"});
        return Divergence2D::squared_norm();
    }
    if (kind == "mahalanobis") {
        detail::expect_keys(o, "divergence2d", {"kind", "s"});
        return Divergence2D::mahalanobis(
            detail::get_mat2(detail::require(o, "divergence2d", "s"), "divergence2d.s"));
    }
    if (kind == "additive") {
        detail::expect_keys(o, "divergence2d", {"kind", "x", "y"});
        return Divergence2D::additive(parse_divergence(detail::require(o, "divergence2d", "x")),
                                      parse_divergence(detail::require(o, "divergence2d", "y")));
    }
    throw ConfigError("config: unknown divergence2d kind '" + kind + "'");
}

struct OutputNames {
    std::string codebook = "codebook.csv";
    std::string report = "report.json";
    std::string verification = "verification.json";
    std::string reconstruction = "reconstruction.csv";
    std::string codes = "codes2d.csv";
    std::string assignments = "assignments2d.csv";
};

inline OutputNames parse_output(const json& o) {
    detail::expect_keys(o, "output",
                        {"codebook", "report", "verification", "reconstruction", "codes",
                         "assignments"});
    OutputNames names;
    if (o.contains("codebook")) names.codebook = detail::get_str(o, "output", "codebook");
    if (o.contains("report")) names.report = detail::get_str(o, "output", "report");
    if (o.contains("verification"))
        names.verification = detail::get_str(o, "output", "verification");
    if (o.contains("reconstruction"))
        names.reconstruction = detail::get_str(o, "output", "reconstruction");
    if (o.contains("codes")) names.codes = detail::get_str(o, "output", "codes");
    if (o.contains("assignments")) names.assignments = detail::get_str(o, "output", "assignments");
    return names;
}

/// One parsed run. Exactly one of fn/density (1D) or dv2/samples (2D) is
/// populated, keyed on two_d.
struct ParsedRun {
    bool two_d = false;

    std::optional<BregmanFunction> fn;
    std::optional<Density1D> density;
    std::size_t n = 1;
    double r = 2.0;
    SolverConfig solver;
    QuadratureConfig quad;
    std::string codebook_in; // verify input; empty means "use the out dir"

    std::optional<Divergence2D> dv2;
    Sample2DDescriptor sample_desc;
    std::size_t sample_count = 0;
    std::optional<std::uint64_t> sample_seed;
    Lloyd2DConfig solver2d;

    std::uint64_t seed = 0;
    OutputNames out;
};

inline ParsedRun parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ParsedRun run;
    if (j.contains("divergence2d")) {
        detail::expect_keys(j, "config",
                            {"divergence2d", "samples", "n", "solver2d", "seed", "output"});
        run.two_d = true;
        run.dv2 = parse_divergence2d(detail::require(j, "config", "divergence2d"));
        const json& s = detail::require(j, "config", "samples");
        detail::expect_keys(s, "samples", {"count", "mean", "cov", "positive_quadrant", "seed"});
        run.sample_count =
            static_cast<std::size_t>(detail::get_num(s, "samples", "count"));
        if (run.sample_count == 0) throw ConfigError("config: samples count must be positive");
        if (s.contains("mean")) run.sample_desc.mean = detail::get_vec2(s.at("mean"), "samples.mean");
        if (s.contains("cov")) run.sample_desc.cov = detail::get_mat2(s.at("cov"), "samples.cov");
        run.sample_desc.positive_quadrant =
            detail::get_bool_or(s, "samples", "positive_quadrant", false);
        if (s.contains("seed")) run.sample_seed = detail::get_uint_or(s, "samples", "seed", 0);
        const double n = detail::get_num(j, "config", "n");
        if (!(n >= 1.0)) throw ConfigError("config: n must be a positive integer");
        run.n = static_cast<std::size_t>(n);
        if (j.contains("solver2d")) {
            const json& sv = j.at("solver2d");
            detail::expect_keys(sv, "solver2d", {"max_iter"});
            run.solver2d.max_iter =
                static_cast<int>(detail::get_num_or(sv, "solver2d", "max_iter", 1000.0));
        }
        run.seed = detail::get_uint_or(j, "config", "seed", 0);
        if (j.contains("output")) run.out = parse_output(j.at("output"));
        return run;
    }
    detail::expect_keys(j, "config",
                        {"divergence", "distribution", "n", "r", "solver", "quadrature", "seed",
                         "output", "codebook_csv"});
    run.fn = parse_divergence(detail::require(j, "config", "divergence"));
    run.density = parse_distribution(detail::require(j, "config", "distribution"));
    const double n = detail::get_num(j, "config", "n");
    if (!(n >= 1.0)) throw ConfigError("config: n must be a positive integer");
    run.n = static_cast<std::size_t>(n);
    run.r = detail::get_num_or(j, "config", "r", 2.0);
    if (!(run.r >= 2.0)) throw ConfigError("config: r must be at least 2");
    if (j.contains("solver")) run.solver = parse_solver(j.at("solver"));
    if (j.contains("quadrature")) run.quad = parse_quadrature(j.at("quadrature"));
    run.seed = detail::get_uint_or(j, "config", "seed", 0);
    if (j.contains("output")) run.out = parse_output(j.at("output"));
    if (j.contains("codebook_csv")) run.codebook_in = detail::get_str(j, "config", "codebook_csv");
    return run;
}

inline ParsedRun parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(j);
}

} // namespace bregquant::cli
