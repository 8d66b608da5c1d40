#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bregquant/errors.hpp"

namespace bregquant {

enum class GeneratorKind {
    SquaredNorm,
    NormLike,
    ItakuraSaito,
    KullbackLeibler,
    Logistic,
    SoftPlus,
    SoftButterfly,
    Exponential,
    Custom,
};

/// Sign of the curvature of log F'' on the generator domain.
enum class LogCurvature { LogConcave, LogConvex, Neither, Unknown };

namespace detail {

inline double softplus(double t) {
    // log(1 + e^t) without overflow.
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double log_cosh(double t) {
    return std::abs(t) + std::log1p(std::exp(-2.0 * std::abs(t))) - std::numbers::ln2;
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

} // namespace detail

/// A strictly convex C^2 generator F on an open interval U, together with the
/// derivatives the algorithms need. phi(xi, x) = F(xi) - F(x) - F'(x)(xi - x)
/// is the induced divergence: nonnegative, zero only on the diagonal, and in
/// general asymmetric with no triangle inequality.
///
/// Every factory fixes the analytic derivatives and the curvature class of
/// log F''. Custom generators may supply only F; missing derivatives fall back
/// to central differences and the curvature class stays Unknown unless given.
class BregmanFunction {
public:
    using Fn = std::function<double(double)>;

    static BregmanFunction squared_norm() {
        BregmanFunction b(GeneratorKind::SquaredNorm, -inf(), inf());
        b.f_ = [](double x) { return x * x; };
        b.f1_ = [](double x) { return 2.0 * x; };
        b.f2_ = [](double) { return 2.0; };
        b.f3r_ = [](double) { return 0.0; };
        b.curvature_ = LogCurvature::LogConcave; // log F'' constant
        b.f2_symmetric_ = true;
        return b;
    }

    /// F(x) = x^lambda on (0, inf), lambda > 1.
    /// log F'' = const + (lambda - 2) log x: concave for lambda >= 2, convex
    /// for lambda in (1, 2).
    static BregmanFunction norm_like(double lambda) {
        if (!(lambda > 1.0)) throw DomainError("norm_like: requires lambda > 1");
        BregmanFunction b(GeneratorKind::NormLike, 0.0, inf());
        b.param_ = lambda;
        b.f_ = [lambda](double x) { return std::pow(x, lambda); };
        b.f1_ = [lambda](double x) { return lambda * std::pow(x, lambda - 1.0); };
        b.f2_ = [lambda](double x) { return lambda * (lambda - 1.0) * std::pow(x, lambda - 2.0); };
        b.f3r_ = [lambda](double x) {
            return lambda * (lambda - 1.0) * (lambda - 2.0) * std::pow(x, lambda - 3.0);
        };
        b.curvature_ = lambda >= 2.0 ? LogCurvature::LogConcave : LogCurvature::LogConvex;
        return b;
    }

    /// F(x) = -log x on (0, inf); phi(xi, x) = log(x/xi) + xi/x - 1.
    static BregmanFunction itakura_saito() {
        BregmanFunction b(GeneratorKind::ItakuraSaito, 0.0, inf());
        b.f_ = [](double x) { return -std::log(x); };
        b.f1_ = [](double x) { return -1.0 / x; };
        b.f2_ = [](double x) { return 1.0 / (x * x); };
        b.f3r_ = [](double x) { return -2.0 / (x * x * x); };
        b.curvature_ = LogCurvature::LogConvex; // log F'' = -2 log x
        return b;
    }

    /// F(x) = x log x on (0, inf); phi(xi, x) = xi log(xi/x) - xi + x.
    static BregmanFunction kullback_leibler() {
        BregmanFunction b(GeneratorKind::KullbackLeibler, 0.0, inf());
        b.f_ = [](double x) { return x * std::log(x); };
        b.f1_ = [](double x) { return std::log(x) + 1.0; };
        b.f2_ = [](double x) { return 1.0 / x; };
        b.f3r_ = [](double x) { return -1.0 / (x * x); };
        b.curvature_ = LogCurvature::LogConvex; // log F'' = -log x
        return b;
    }

    /// F(x) = x log x + (1-x) log(1-x) on (0, 1).
    static BregmanFunction logistic() {
        BregmanFunction b(GeneratorKind::Logistic, 0.0, 1.0);
        b.f_ = [](double x) { return detail::xlogx(x) + detail::xlogx(1.0 - x); };
        b.f1_ = [](double x) { return std::log(x / (1.0 - x)); };
        b.f2_ = [](double x) { return 1.0 / (x * (1.0 - x)); };
        b.f3r_ = [](double x) {
            const double y = 1.0 - x;
            return 1.0 / (y * y) - 1.0 / (x * x);
        };
        b.curvature_ = LogCurvature::LogConvex; // -log x - log(1-x)
        return b;
    }

    /// F(x) = log(1 + e^{ax}) / a on R, a > 0. F'' = a s(1-s) with
    /// s = sigmoid(ax) is even, so the symmetry results apply.
    static BregmanFunction soft_plus(double a) {
        if (!(a > 0.0)) throw DomainError("soft_plus: requires a > 0");
        BregmanFunction b(GeneratorKind::SoftPlus, -inf(), inf());
        b.param_ = a;
        b.f_ = [a](double x) { return detail::softplus(a * x) / a; };
        b.f1_ = [a](double x) { return detail::sigmoid(a * x); };
        b.f2_ = [a](double x) {
            const double s = detail::sigmoid(a * x);
            return a * s * (1.0 - s);
        };
        b.f3r_ = [a](double x) {
            const double s = detail::sigmoid(a * x);
            return a * a * s * (1.0 - s) * (1.0 - 2.0 * s);
        };
        b.curvature_ = LogCurvature::LogConcave;
        b.f2_symmetric_ = true;
        return b;
    }

    /// F(x) = log(cosh(ax)) / a on R, a > 0. Coincides with the soft plus
    /// divergence: phi_butterfly_a = 2 phi_softplus_{2a}.
    static BregmanFunction soft_butterfly(double a) {
        if (!(a > 0.0)) throw DomainError("soft_butterfly: requires a > 0");
        BregmanFunction b(GeneratorKind::SoftButterfly, -inf(), inf());
        b.param_ = a;
        b.f_ = [a](double x) { return detail::log_cosh(a * x) / a; };
        b.f1_ = [a](double x) { return std::tanh(a * x); };
        b.f2_ = [a](double x) {
            const double t = std::tanh(a * x);
            return a * (1.0 - t * t);
        };
        b.f3r_ = [a](double x) {
            const double t = std::tanh(a * x);
            return -2.0 * a * a * t * (1.0 - t * t);
        };
        b.curvature_ = LogCurvature::LogConcave;
        b.f2_symmetric_ = true;
        return b;
    }

    /// F(x) = e^{ax} on R, a != 0. log F'' is affine; both curvature branches
    /// hold, recorded as LogConcave.
    static BregmanFunction exponential(double a) {
        if (a == 0.0 || !std::isfinite(a)) throw DomainError("exponential: requires a != 0");
        BregmanFunction b(GeneratorKind::Exponential, -inf(), inf());
        b.param_ = a;
        b.f_ = [a](double x) { return std::exp(a * x); };
        b.f1_ = [a](double x) { return a * std::exp(a * x); };
        b.f2_ = [a](double x) { return a * a * std::exp(a * x); };
        b.f3r_ = [a](double x) { return a * a * a * std::exp(a * x); };
        b.curvature_ = LogCurvature::LogConcave;
        return b;
    }

    /// User-supplied generator. f is required; missing derivatives are
    /// replaced by central differences (step cbrt(eps) * max(1,|x|) for f1,
    /// eps^{1/4} * max(1,|x|) for f2, one-sided 1e-6 * max(1,|x|) for f3r).
    static BregmanFunction custom(double lo, double hi, Fn f, Fn f1 = nullptr, Fn f2 = nullptr,
                                  Fn f3r = nullptr,
                                  LogCurvature curvature = LogCurvature::Unknown,
                                  bool f2_symmetric = false) {
        if (!f) throw DomainError("custom: generator f is required");
        if (!(lo < hi)) throw DomainError("custom: empty domain");
        BregmanFunction b(GeneratorKind::Custom, lo, hi);
        b.f_ = std::move(f);
        b.analytic_f1_ = static_cast<bool>(f1);
        b.analytic_f2_ = static_cast<bool>(f2);
        b.analytic_f3r_ = static_cast<bool>(f3r);
        Fn base = b.f_;
        if (!f1) {
            f1 = [base](double x) {
                const double h = std::cbrt(eps()) * std::max(1.0, std::abs(x));
                return (base(x + h) - base(x - h)) / (2.0 * h);
            };
        }
        if (!f2) {
            f2 = [base](double x) {
                const double h = std::pow(eps(), 0.25) * std::max(1.0, std::abs(x));
                return (base(x + h) - 2.0 * base(x) + base(x - h)) / (h * h);
            };
        }
        if (!f3r) {
            Fn d2 = f2;
            f3r = [d2](double x) {
                const double h = 1e-6 * std::max(1.0, std::abs(x));
                return (d2(x + h) - d2(x)) / h;
            };
        }
        b.f1_ = std::move(f1);
        b.f2_ = std::move(f2);
        b.f3r_ = std::move(f3r);
        b.curvature_ = curvature;
        b.f2_symmetric_ = f2_symmetric;
        return b;
    }

    GeneratorKind kind() const { return kind_; }
    double param() const { return param_; }
    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }
    LogCurvature log_curvature_of_f2() const { return curvature_; }
    bool f2_symmetric() const { return f2_symmetric_; }
    bool analytic_f1() const { return analytic_f1_; }
    bool analytic_f2() const { return analytic_f2_; }
    bool analytic_f3r() const { return analytic_f3r_; }

    /// Strict interior test with guard band 1e-12 * max(1, |finite endpoints|).
    bool contains(double x) const {
        if (!std::isfinite(x)) return false;
        const double e = domain_guard();
        if (std::isfinite(lo_) && !(x > lo_ + e)) return false;
        if (std::isfinite(hi_) && !(x < hi_ - e)) return false;
        return true;
    }

    void check_inside(double x, const char* who) const {
        if (!contains(x))
            throw DomainError(std::string(who) + ": argument " + std::to_string(x) +
                              " outside open domain");
    }

    double f(double x) const { return f_(x); }
    double f1(double x) const { return f1_(x); }
    double f2(double x) const { return f2_(x); }
    double f3r(double x) const { return f3r_(x); }

    /// phi(xi, x) = F(xi) - F(x) - F'(x)(xi - x). Both arguments must lie in
    /// the open domain; boundary hits are rejected, not clamped.
    double phi(double xi, double x) const {
        check_inside(xi, "phi");
        check_inside(x, "phi");
        return f_(xi) - f_(x) - f1_(x) * (xi - x);
    }

private:
    BregmanFunction(GeneratorKind k, double lo, double hi) : kind_(k), lo_(lo), hi_(hi) {}

    static constexpr double inf() { return std::numeric_limits<double>::infinity(); }
    static constexpr double eps() { return std::numeric_limits<double>::epsilon(); }

    double domain_guard() const {
        double scale = 1.0;
        if (std::isfinite(lo_)) scale = std::max(scale, std::abs(lo_));
        if (std::isfinite(hi_)) scale = std::max(scale, std::abs(hi_));
        return 1e-12 * scale;
    }

    GeneratorKind kind_;
    double lo_, hi_;
    double param_ = 0.0;
    Fn f_, f1_, f2_, f3r_;
    LogCurvature curvature_ = LogCurvature::Unknown;
    bool f2_symmetric_ = false;
    bool analytic_f1_ = true, analytic_f2_ = true, analytic_f3r_ = true;
};

inline double phi(const BregmanFunction& fn, double xi, double x) { return fn.phi(xi, x); }

/// sum_k lambda_k phi_k(xi, x) for nonnegative weights, not all zero.
/// The mixture is again a Bregman divergence (generator sum lambda_k F_k).
inline double phi_linear_combination(const std::vector<std::pair<double, BregmanFunction>>& terms,
                                     double xi, double x) {
    if (terms.empty()) throw DomainError("phi_linear_combination: no terms");
    bool positive = false;
    for (const auto& [w, fn] : terms) {
        if (w < 0.0) throw DomainError("phi_linear_combination: negative weight");
        if (w > 0.0) positive = true;
    }
    if (!positive) throw DomainError("phi_linear_combination: all weights zero");
    double s = 0.0;
    for (const auto& [w, fn] : terms)
        if (w > 0.0) s += w * fn.phi(xi, x);
    return s;
}

/// phi(u,v) + phi(v,w) - phi(u,w) - (F'(w) - F'(v)) (u - v); identically zero.
inline double three_point_residual(const BregmanFunction& fn, double u, double v, double w) {
    return fn.phi(u, v) + fn.phi(v, w) - fn.phi(u, w) - (fn.f1(w) - fn.f1(v)) * (u - v);
}

struct EuclideanEnvelope {
    double lower;  // (alpha/2)(xi-x)^2, 0 when alpha not given
    double value;  // phi(xi, x)
    double upper;  // (L/2)(xi-x)^2, +inf when L not given
};

/// Quadratic envelope of phi from a Lipschitz constant L of F' and/or a
/// strong-convexity constant alpha. Throws BoundViolation when the claimed
/// constants contradict the computed value.
inline EuclideanEnvelope euclidean_envelope(const BregmanFunction& fn, double xi, double x,
                                            std::optional<double> L = std::nullopt,
                                            std::optional<double> alpha = std::nullopt) {
    EuclideanEnvelope e{};
    e.value = fn.phi(xi, x);
    const double d2 = (xi - x) * (xi - x);
    e.lower = alpha ? 0.5 * *alpha * d2 : 0.0;
    e.upper = L ? 0.5 * *L * d2 : std::numeric_limits<double>::infinity();
    const double slack = 1e-12 * (1.0 + std::abs(e.value));
    if (e.value + slack < e.lower || e.value - slack > e.upper)
        throw BoundViolation("euclidean_envelope: constants inconsistent with phi");
    return e;
}

inline std::string to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::SquaredNorm: return "squared_norm";
        case GeneratorKind::NormLike: return "norm_like";
        case GeneratorKind::ItakuraSaito: return "itakura_saito";
        case GeneratorKind::KullbackLeibler: return "kullback_leibler";
        case GeneratorKind::Logistic: return "logistic";
        case GeneratorKind::SoftPlus: return "soft_plus";
        case GeneratorKind::SoftButterfly: return "soft_butterfly";
        case GeneratorKind::Exponential: return "exponential";
        case GeneratorKind::Custom: return "custom";
    }
    return "unknown";
}

inline std::string to_string(LogCurvature c) {
    switch (c) {
        case LogCurvature::LogConcave: return "log_concave";
        case LogCurvature::LogConvex: return "log_convex";
        case LogCurvature::Neither: return "neither";
        case LogCurvature::Unknown: return "unknown";
    }
    return "unknown";
}

} // namespace bregquant
