#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "bregquant/errors.hpp"

namespace bregquant {

enum class QuadRule { GaussLegendre15, Simpson };

struct QuadratureConfig {
    double abs_tol = 1e-11;
    double rel_tol = 1e-10;
    int max_depth = 40;
    QuadRule base_rule = QuadRule::GaussLegendre15;
};

namespace detail {

template <std::size_t N>
struct GaussLegendreTable {
    std::array<double, N> node;   // on [-1, 1]
    std::array<double, N> weight;
};

// Nodes by Newton iteration on the Legendre recurrence; exact to machine
// precision and symmetric by construction.
template <std::size_t N>
inline GaussLegendreTable<N> make_gauss_legendre() {
    GaussLegendreTable<N> t{};
    const std::size_t m = (N + 1) / 2;
    for (std::size_t k = 0; k < m; ++k) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) /
                            (static_cast<double>(N) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= N; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = N * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        t.node[k] = -x;
        t.node[N - 1 - k] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        t.weight[k] = w;
        t.weight[N - 1 - k] = w;
    }
    return t;
}

template <class F>
inline double gauss15(F&& f, double lo, double hi) {
    static const GaussLegendreTable<15> t = make_gauss_legendre<15>();
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < 15; ++i) s += t.weight[i] * f(c + h * t.node[i]);
    return s * h;
}

template <class F>
inline double simpson3(F&& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
}

template <class F>
inline double base_estimate(F&& f, double lo, double hi, QuadRule rule) {
    return rule == QuadRule::GaussLegendre15 ? gauss15(f, lo, hi) : simpson3(f, lo, hi);
}

struct Segment {
    double lo, hi;
    double coarse;    // one-panel estimate
    double refined;   // sum of the two half-panel estimates
    double error;     // |refined - coarse|
    int depth;
};

template <class F>
inline Segment make_segment(F&& f, double lo, double hi, int depth, QuadRule rule) {
    Segment s{lo, hi, 0.0, 0.0, 0.0, depth};
    s.coarse = base_estimate(f, lo, hi, rule);
    const double mid = 0.5 * (lo + hi);
    s.refined = base_estimate(f, lo, mid, rule) + base_estimate(f, mid, hi, rule);
    s.error = std::abs(s.refined - s.coarse);
    return s;
}

} // namespace detail

/// Globally adaptive quadrature: bisects the segment with the largest error
/// estimate until the summed estimate meets max(abs_tol, rel_tol * |integral|).
/// Throws QuadratureError when a segment would exceed max_depth bisections.
template <class F>
double integrate(F&& f, double lo, double hi, const QuadratureConfig& q = {}) {
    if (!(lo <= hi)) throw DomainError("integrate: lo > hi");
    if (lo == hi) return 0.0;

    std::vector<detail::Segment> segs;
    segs.push_back(detail::make_segment(f, lo, hi, 0, q.base_rule));

    // Desk-scale guard; tolerance failures surface as QuadratureError below.
    constexpr std::size_t max_segments = 200000;

    for (;;) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].refined;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        const double tol = std::max(q.abs_tol, q.rel_tol * std::abs(total));
        if (err <= tol) return total;
        if (segs[worst].depth >= q.max_depth)
            throw QuadratureError("integrate: max_depth exhausted, error estimate " +
                                  std::to_string(err));
        if (segs.size() >= max_segments)
            throw QuadratureError("integrate: segment budget exhausted");

        const detail::Segment s = segs[worst];
        const double mid = 0.5 * (s.lo + s.hi);
        segs[worst] = detail::make_segment(f, s.lo, mid, s.depth + 1, q.base_rule);
        segs.push_back(detail::make_segment(f, mid, s.hi, s.depth + 1, q.base_rule));
    }
}

} // namespace bregquant
