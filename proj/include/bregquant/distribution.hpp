#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "bregquant/divergence.hpp"
#include "bregquant/errors.hpp"
#include "bregquant/quadrature.hpp"

namespace bregquant {

enum class DensityKind { Gaussian, Uniform, TruncatedGaussian, CustomDensity };

namespace detail {

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

} // namespace detail

/// A probability density on an interval, with enough structure for the
/// quantization pipeline: pointwise evaluation, the derivative of log h used
/// by the unimodality check, an exact CDF for the built-in families, and
/// quantiles by bisection on the CDF.
class Density1D {
public:
    using Fn = std::function<double(double)>;

    static Density1D gaussian(double mu, double sigma) {
        if (!(sigma > 0.0)) throw DomainError("gaussian: requires sigma > 0");
        Density1D d(DensityKind::Gaussian, -inf(), inf());
        d.mu_ = mu;
        d.sigma_ = sigma;
        d.pdf_ = [mu, sigma](double x) { return detail::normal_pdf((x - mu) / sigma) / sigma; };
        d.dlog_ = [mu, sigma](double x) { return -(x - mu) / (sigma * sigma); };
        d.cdf_ = [mu, sigma](double x) { return detail::normal_cdf((x - mu) / sigma); };
        return d;
    }

    static Density1D uniform(double a, double b) {
        if (!(a < b)) throw DomainError("uniform: requires a < b");
        Density1D d(DensityKind::Uniform, a, b);
        const double inv = 1.0 / (b - a);
        d.pdf_ = [a, b, inv](double x) { return (x < a || x > b) ? 0.0 : inv; };
        d.dlog_ = [](double) { return 0.0; };
        d.cdf_ = [a, b, inv](double x) {
            if (x <= a) return 0.0;
            if (x >= b) return 1.0;
            return (x - a) * inv;
        };
        return d;
    }

    static Density1D truncated_gaussian(double mu, double sigma, double lo, double hi,
                                        double mass_defect = 0.0) {
        if (!(sigma > 0.0)) throw DomainError("truncated_gaussian: requires sigma > 0");
        if (!(lo < hi)) throw DomainError("truncated_gaussian: requires lo < hi");
        Density1D d(DensityKind::TruncatedGaussian, lo, hi);
        d.mu_ = mu;
        d.sigma_ = sigma;
        d.mass_defect_ = mass_defect;
        const double ca = detail::normal_cdf((lo - mu) / sigma);
        const double cb = detail::normal_cdf((hi - mu) / sigma);
        const double z = cb - ca;
        if (!(z > 0.0)) throw DomainError("truncated_gaussian: window carries no mass");
        d.pdf_ = [mu, sigma, lo, hi, z](double x) {
            if (x < lo || x > hi) return 0.0;
            return detail::normal_pdf((x - mu) / sigma) / (sigma * z);
        };
        d.dlog_ = [mu, sigma](double x) { return -(x - mu) / (sigma * sigma); };
        d.cdf_ = [mu, sigma, lo, hi, ca, z](double x) {
            if (x <= lo) return 0.0;
            if (x >= hi) return 1.0;
            return (detail::normal_cdf((x - mu) / sigma) - ca) / z;
        };
        return d;
    }

    /// Caller-normalized density on [lo, hi]. dlog_pdf may be omitted; pass
    /// fd_dlog = true to allow a finite-difference estimate (flagged
    /// approximate, step 1e-6 * max(1,|x|)).
    static Density1D custom(double lo, double hi, Fn pdf, Fn dlog_pdf = nullptr,
                            bool fd_dlog = false) {
        if (!pdf) throw DomainError("custom density: pdf is required");
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw DomainError("custom density: requires bounded support");
        Density1D d(DensityKind::CustomDensity, lo, hi);
        d.pdf_ = std::move(pdf);
        d.dlog_analytic_ = static_cast<bool>(dlog_pdf);
        if (dlog_pdf) {
            d.dlog_ = std::move(dlog_pdf);
        } else if (fd_dlog) {
            Fn base = d.pdf_;
            d.dlog_ = [base](double x) {
                const double h = 1e-6 * std::max(1.0, std::abs(x));
                return (std::log(base(x + h)) - std::log(base(x - h))) / (2.0 * h);
            };
        }
        return d;
    }

    DensityKind kind() const { return kind_; }
    double location() const { return mu_; }
    double scale() const { return sigma_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    bool bounded() const { return std::isfinite(lo_) && std::isfinite(hi_); }
    double total_mass_defect() const { return mass_defect_; }
    bool has_dlog() const { return static_cast<bool>(dlog_); }
    bool dlog_analytic() const { return dlog_analytic_; }

    double pdf(double x) const { return pdf_(x); }

    double dlog_pdf(double x) const {
        if (!dlog_) throw DomainError("dlog_pdf: unavailable for this density");
        return dlog_(x);
    }

    double cdf(double x) const {
        if (cdf_) return cdf_(x);
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        return integrate(pdf_, lo_, x, QuadratureConfig{});
    }

    /// Quantile by bisection on the CDF; exact to ~1 ulp of the bracket.
    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: requires p in (0,1)");
        double a = lo_, b = hi_;
        if (!std::isfinite(a)) a = mu_ - 20.0 * sigma_;
        if (!std::isfinite(b)) b = mu_ + 20.0 * sigma_;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            (cdf(m) < p ? a : b) = m;
        }
        return 0.5 * (a + b);
    }

private:
    Density1D(DensityKind k, double lo, double hi) : kind_(k), lo_(lo), hi_(hi) {}

    static constexpr double inf() { return std::numeric_limits<double>::infinity(); }

    DensityKind kind_;
    double lo_, hi_;
    double mu_ = 0.0, sigma_ = 1.0;
    double mass_defect_ = 0.0;
    Fn pdf_, dlog_, cdf_;
    bool dlog_analytic_ = true;
};

/// (mass, first moment) of P over [lo, hi].
inline std::pair<double, double> cell_moments(const Density1D& d, const QuadratureConfig& q,
                                              double lo, double hi) {
    if (!(lo <= hi)) throw DomainError("cell_moments: lo > hi");
    const double mass = integrate([&](double x) { return d.pdf(x); }, lo, hi, q);
    const double mom = integrate([&](double x) { return x * d.pdf(x); }, lo, hi, q);
    return {mass, mom};
}

/// (weighted mass, weighted first moment) with weight phi(xi, x_i)^{r/2 - 1};
/// for r = 2 the weight is identically one.
inline std::pair<double, double> weighted_cell_moments(const Density1D& d,
                                                       const QuadratureConfig& q,
                                                       const BregmanFunction& fn, double xi_code,
                                                       double r, double lo, double hi) {
    if (!(r >= 2.0)) throw DomainError("weighted_cell_moments: requires r >= 2");
    if (r == 2.0) return cell_moments(d, q, lo, hi);
    const double expo = 0.5 * r - 1.0;
    // phi can round to a tiny negative right at the code
    auto w = [&](double x) { return std::pow(std::max(0.0, fn.phi(x, xi_code)), expo) * d.pdf(x); };
    const double mass = integrate(w, lo, hi, q);
    const double mom = integrate([&](double x) { return x * w(x); }, lo, hi, q);
    return {mass, mom};
}

/// Replace an unbounded density by its renormalized restriction to the
/// central 1 - tail_mass quantile window.
inline Density1D truncate_support(const Density1D& d, double tail_mass) {
    if (d.bounded()) throw DomainError("truncate_support: support already bounded");
    if (!(tail_mass > 0.0 && tail_mass < 0.5))
        throw DomainError("truncate_support: requires tail_mass in (0, 0.5)");
    // Only the Gaussian family is unbounded among the built-ins.
    if (d.kind() != DensityKind::Gaussian)
        throw DomainError("truncate_support: unsupported density kind");
    // The lower quantile is accurate deep into the tail (the CDF value is far
    // from 1); the upper endpoint is its exact mirror.
    const double lo = d.quantile(0.5 * tail_mass);
    const double hi = 2.0 * d.location() - lo;
    return Density1D::truncated_gaussian(d.location(), d.scale(), lo, hi, tail_mass);
}

} // namespace bregquant
