#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bregquant/distribution.hpp"
#include "bregquant/divergence.hpp"
#include "bregquant/errors.hpp"
#include "bregquant/geometry1d.hpp"

namespace bregquant {

struct CellContribution {
    double mass;
    double contribution; // integral of phi(., x_i)^{r/2} over the cell
};

struct DistortionReport {
    double g = 0.0; // sum of cell contributions
    double e = 0.0; // g^{1/r}
    std::vector<CellContribution> per_cell;
    std::optional<std::vector<double>> gradient;
};

namespace detail {

inline void require_compatible(const BregmanFunction& fn, const Density1D& d, const char* who) {
    if (!d.bounded())
        throw DomainError(std::string(who) + ": unbounded support, truncate first");
    if (fn.domain_lo() > d.support_lo() || fn.domain_hi() < d.support_hi())
        throw DomainError(std::string(who) + ": support escapes generator domain");
}

} // namespace detail

/// G_{r,n} = sum_i integral over C_i of phi(xi, x_i)^{r/2} P(dxi), with the
/// cells induced by the codebook, plus e = G^{1/r}.
inline DistortionReport distortion(const BregmanFunction& fn, const Density1D& d,
                                   const Codebook1D& cb, double r,
                                   const QuadratureConfig& q = {},
                                   bool with_gradient = false) {
    if (!(r > 0.0)) throw DomainError("distortion: requires r > 0");
    detail::require_compatible(fn, d, "distortion");
    const auto bounds = cells(fn, cb, d.support_lo(), d.support_hi());
    const double expo = 0.5 * r;
    DistortionReport rep;
    rep.per_cell.reserve(cb.size());
    for (std::size_t i = 0; i < cb.size(); ++i) {
        const double lo = bounds.cuts[i], hi = bounds.cuts[i + 1];
        const double xi = cb.codes[i];
        const double mass = integrate([&](double t) { return d.pdf(t); }, lo, hi, q);
        const double g = integrate(
            [&](double t) {
                // phi can round to a tiny negative right at the code
                const double p = std::max(0.0, fn.phi(t, xi));
                return (expo == 1.0 ? p : std::pow(p, expo)) * d.pdf(t);
            },
            lo, hi, q);
        rep.per_cell.push_back({mass, g});
        rep.g += g;
    }
    rep.e = std::pow(rep.g, 1.0 / r);
    if (with_gradient) {
        // reuse of the r >= 2 gradient defined below
        std::vector<double> grad;
        grad.reserve(cb.size());
        for (std::size_t i = 0; i < cb.size(); ++i) {
            const auto [wm, wmom] = weighted_cell_moments(d, q, fn, cb.codes[i], r,
                                                          bounds.cuts[i], bounds.cuts[i + 1]);
            grad.push_back(0.5 * r * fn.f2(cb.codes[i]) * (cb.codes[i] * wm - wmom));
        }
        rep.gradient = std::move(grad);
    }
    return rep;
}

/// E F(X) - F(E X) >= 0; the n = 1 quantization error for any code placement
/// at the mean, and the exact optimum of G_{2,1}.
inline double f_variance(const BregmanFunction& fn, const Density1D& d,
                         const QuadratureConfig& q = {}) {
    detail::require_compatible(fn, d, "f_variance");
    const auto [mass, mom] = cell_moments(d, q, d.support_lo(), d.support_hi());
    const double mean = mom / mass;
    const double ef = integrate([&](double t) { return fn.f(t) * d.pdf(t); }, d.support_lo(),
                                d.support_hi(), q);
    return ef / mass - fn.f(mean);
}

/// Gradient of G_{r,n} in the codes, r >= 2:
///   (r/2) F''(x_i) integral over C_i of (x_i - xi) phi(xi, x_i)^{r/2-1} P(dxi).
/// The cut motion contributes nothing: the integrand of G is continuous
/// across cuts by the equal-divergence property.
inline std::vector<double> gradient(const BregmanFunction& fn, const Density1D& d,
                                    const Codebook1D& cb, double r,
                                    const QuadratureConfig& q = {}) {
    if (!(r >= 2.0)) throw DomainError("gradient: defined for r >= 2 only");
    detail::require_compatible(fn, d, "gradient");
    const auto bounds = cells(fn, cb, d.support_lo(), d.support_hi());
    std::vector<double> grad;
    grad.reserve(cb.size());
    for (std::size_t i = 0; i < cb.size(); ++i) {
        const auto [wm, wmom] = weighted_cell_moments(d, q, fn, cb.codes[i], r, bounds.cuts[i],
                                                      bounds.cuts[i + 1]);
        grad.push_back(0.5 * r * fn.f2(cb.codes[i]) * (cb.codes[i] * wm - wmom));
    }
    return grad;
}

/// Row sums of the r = 2 distortion Hessian at a stationary codebook:
///   L_i = F''(x_i) [ P(C_i) - (cut_r - x_i) h(cut_r) psi(x_i, x_{i+1})
///                          - (x_i - cut_l) h(cut_l) psi(x_{i-1}, x_i) ],
/// end cells dropping the missing term. Nonnegative at stationary points
/// when F'' is log-concave (psi <= 1 there) and h is log-concave; for
/// log-convex F'' the values are reported as data, without a sign guarantee.
inline std::vector<double> hessian_line_sums(const BregmanFunction& fn, const Density1D& d,
                                             const Codebook1D& cb,
                                             const QuadratureConfig& q = {},
                                             double stationarity_tol = 1e-8) {
    detail::require_compatible(fn, d, "hessian_line_sums");
    const auto bounds = cells(fn, cb, d.support_lo(), d.support_hi());
    const std::size_t n = cb.size();
    std::vector<double> mass(n);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [m, mom] = cell_moments(d, q, bounds.cuts[i], bounds.cuts[i + 1]);
        mass[i] = m;
        if (!(m > 0.0)) throw ZeroWeightCell("hessian_line_sums: massless cell");
        residual = std::max(residual, std::abs(cb.codes[i] - mom / m));
    }
    if (residual > stationarity_tol)
        throw NotStationary("hessian_line_sums: residual " + std::to_string(residual));
    std::vector<double> sums(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = mass[i];
        if (i + 1 < n) {
            const double cut = bounds.cuts[i + 1];
            s -= (cut - cb.codes[i]) * d.pdf(cut) * psi_phi(fn, cb.codes[i], cb.codes[i + 1]).psi;
        }
        if (i > 0) {
            const double cut = bounds.cuts[i];
            s -= (cb.codes[i] - cut) * d.pdf(cut) * psi_phi(fn, cb.codes[i - 1], cb.codes[i]).psi;
        }
        sums[i] = fn.f2(cb.codes[i]) * s;
    }
    return sums;
}

} // namespace bregquant
