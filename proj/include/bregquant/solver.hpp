#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bregquant/distortion.hpp"
#include "bregquant/distribution.hpp"
#include "bregquant/divergence.hpp"
#include "bregquant/errors.hpp"
#include "bregquant/geometry1d.hpp"

namespace bregquant {

enum class InitRule { Quantiles, UserSupplied };

struct SolverConfig {
    int max_iter = 20000;
    double code_tol = 1e-10;     // sup-norm of the accepted step
    double residual_tol = 1e-10; // sup-norm of x - T(x)
    double damping = 0.5;        // weighted fixed point only, in (0, 1]
    InitRule init = InitRule::Quantiles;
    std::vector<double> init_codes;
};

struct IterationRecord {
    double distortion;
    double sup_step;
    double sup_residual;
};

struct RunTrace {
    std::vector<IterationRecord> steps;
    bool converged = false;
    int iterations = 0;
};

struct SolveResult {
    Codebook1D codebook;
    CellBoundaries cuts;
    RunTrace trace;
};

/// Codes at the (2i - 1) / 2n quantiles; the canonical starting point.
inline Codebook1D init_quantiles(const Density1D& d, std::size_t n) {
    if (n == 0) throw DomainError("init_quantiles: n must be positive");
    Codebook1D cb;
    cb.codes.reserve(n);
    for (std::size_t i = 1; i <= n; ++i)
        cb.codes.push_back(d.quantile((2.0 * static_cast<double>(i) - 1.0) / (2.0 * n)));
    return cb;
}

namespace detail {

inline Codebook1D initial_codes(const BregmanFunction& fn, const Density1D& d, std::size_t n,
                                const SolverConfig& cfg) {
    Codebook1D cb;
    if (cfg.init == InitRule::UserSupplied) {
        if (cfg.init_codes.size() != n)
            throw DomainError("solver: init_codes size does not match n");
        cb.codes = cfg.init_codes;
    } else {
        cb = init_quantiles(d, n);
    }
    cb.validate(fn);
    return cb;
}

} // namespace detail

/// Fixed point iteration on the r = 2 stationarity map: each code moves to
/// the conditional mean of its own cell. Convergence requires both the step
/// and the residual sup-norms under tolerance; hitting max_iter first returns
/// the best iterate with trace.converged = false. For r = 2 the recorded
/// distortion sequence never increases.
inline SolveResult lloyd(const BregmanFunction& fn, const Density1D& d, std::size_t n,
                         const QuadratureConfig& q = {}, const SolverConfig& cfg = {}) {
    detail::require_compatible(fn, d, "lloyd");
    Codebook1D cb = detail::initial_codes(fn, d, n, cfg);
    SolveResult res;
    res.trace.converged = false;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const auto bounds = cells(fn, cb, d.support_lo(), d.support_hi());
        double g = 0.0, residual = 0.0;
        Codebook1D next = cb;
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = bounds.cuts[i], hi = bounds.cuts[i + 1];
            const auto [mass, mom] = cell_moments(d, q, lo, hi);
            if (!(mass > 0.0)) throw ZeroWeightCell("lloyd: massless cell");
            next.codes[i] = mom / mass;
            residual = std::max(residual, std::abs(next.codes[i] - cb.codes[i]));
            g += integrate([&](double t) { return fn.phi(t, cb.codes[i]) * d.pdf(t); }, lo, hi,
                           q);
        }
        // Undamped map: the step about to be taken equals the residual.
        res.trace.steps.push_back({g, residual, residual});
        res.trace.iterations = iter + 1;
        if (residual <= cfg.residual_tol && residual <= cfg.code_tol) {
            res.trace.converged = true;
            res.codebook = cb;
            res.cuts = bounds;
            return res;
        }
        cb = next;
    }
    res.codebook = cb;
    res.cuts = cells(fn, cb, d.support_lo(), d.support_hi());
    return res;
}

/// Damped fixed point for r > 2 on the weighted stationarity map
///   T_i(x) = integral of xi w / integral of w,  w = phi(xi, x_i)^{r/2-1},
/// stepping x + damping (T(x) - x). Plain lloyd covers r = 2.
inline SolveResult weighted_lloyd(const BregmanFunction& fn, const Density1D& d, std::size_t n,
                                  double r, const QuadratureConfig& q = {},
                                  const SolverConfig& cfg = {}) {
    if (!(r > 2.0)) throw DomainError("weighted_lloyd: requires r > 2 (use lloyd for r = 2)");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
        throw DomainError("weighted_lloyd: damping must lie in (0, 1]");
    detail::require_compatible(fn, d, "weighted_lloyd");
    Codebook1D cb = detail::initial_codes(fn, d, n, cfg);
    SolveResult res;
    const double expo = 0.5 * r;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const auto bounds = cells(fn, cb, d.support_lo(), d.support_hi());
        double g = 0.0, residual = 0.0, step = 0.0;
        Codebook1D next = cb;
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = bounds.cuts[i], hi = bounds.cuts[i + 1];
            const auto [wm, wmom] =
                weighted_cell_moments(d, q, fn, cb.codes[i], r, lo, hi);
            if (!(wm > 0.0) || !std::isfinite(wm))
                throw ZeroWeightCell("weighted_lloyd: weight mass underflow in cell " +
                                     std::to_string(i));
            const double target = wmom / wm;
            residual = std::max(residual, std::abs(target - cb.codes[i]));
            next.codes[i] = cb.codes[i] + cfg.damping * (target - cb.codes[i]);
            step = std::max(step, std::abs(next.codes[i] - cb.codes[i]));
            g += integrate(
                [&](double t) {
                    return std::pow(std::max(0.0, fn.phi(t, cb.codes[i])), expo) * d.pdf(t);
                },
                lo, hi, q);
        }
        res.trace.steps.push_back({g, step, residual});
        res.trace.iterations = iter + 1;
        if (residual <= cfg.residual_tol && step <= cfg.code_tol) {
            res.trace.converged = true;
            res.codebook = cb;
            res.cuts = bounds;
            return res;
        }
        cb = next;
    }
    res.codebook = cb;
    res.cuts = cells(fn, cb, d.support_lo(), d.support_hi());
    return res;
}

/// Plain gradient descent on G_{r,n}. The step must stay below 1 / sup F''
/// over the working interval; a step that reorders or merges codes aborts
/// with OrderCollapse rather than silently re-sorting.
inline SolveResult gradient_descent(const BregmanFunction& fn, const Density1D& d, std::size_t n,
                                    double r, double step_size,
                                    const QuadratureConfig& q = {},
                                    const SolverConfig& cfg = {}) {
    if (!(step_size > 0.0)) throw DomainError("gradient_descent: step must be positive");
    detail::require_compatible(fn, d, "gradient_descent");
    Codebook1D cb = detail::initial_codes(fn, d, n, cfg);
    SolveResult res;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const auto rep = distortion(fn, d, cb, r, q, /*with_gradient=*/true);
        const auto& grad = *rep.gradient;
        double gnorm = 0.0;
        for (double gi : grad) gnorm = std::max(gnorm, std::abs(gi));
        res.trace.steps.push_back({rep.g, step_size * gnorm, gnorm});
        res.trace.iterations = iter + 1;
        if (gnorm <= cfg.residual_tol) {
            res.trace.converged = true;
            res.codebook = cb;
            res.cuts = cells(fn, cb, d.support_lo(), d.support_hi());
            return res;
        }
        Codebook1D next = cb;
        for (std::size_t i = 0; i < n; ++i) next.codes[i] = cb.codes[i] - step_size * grad[i];
        double scale = 1.0;
        for (double c : next.codes) scale = std::max(scale, std::abs(c));
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(next.codes[i + 1] - next.codes[i] > 1e-10 * scale))
                throw OrderCollapse("gradient_descent: codes merged at index " +
                                    std::to_string(i));
        for (double c : next.codes)
            if (!fn.contains(c))
                throw OrderCollapse("gradient_descent: code escaped the domain");
        cb = next;
    }
    res.codebook = cb;
    res.cuts = cells(fn, cb, d.support_lo(), d.support_hi());
    return res;
}

} // namespace bregquant
