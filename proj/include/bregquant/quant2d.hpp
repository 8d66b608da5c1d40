#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bregquant/divergence.hpp"
#include "bregquant/errors.hpp"
#include "bregquant/sampling.hpp"

namespace bregquant {

enum class Divergence2DKind { SquaredNorm2, Mahalanobis, AdditiveMarginal };

/// Divergences on R^2 (or a product domain): plain squared norm, the
/// Mahalanobis quadratic form of an SPD matrix, and separable sums
/// phi_fx(xi_1, x_1) + phi_fy(xi_2, x_2) of 1D divergences.
class Divergence2D {
public:
    static Divergence2D squared_norm() {
        Divergence2D d(Divergence2DKind::SquaredNorm2);
        return d;
    }

    static Divergence2D mahalanobis(const std::array<std::array<double, 2>, 2>& s) {
        detail::cholesky2(s); // SPD or DomainError
        Divergence2D d(Divergence2DKind::Mahalanobis);
        d.s_ = s;
        return d;
    }

    static Divergence2D additive(BregmanFunction fx, BregmanFunction fy) {
        Divergence2D d(Divergence2DKind::AdditiveMarginal);
        d.fx_.push_back(std::move(fx));
        d.fx_.push_back(std::move(fy));
        return d;
    }

    Divergence2DKind kind() const { return kind_; }
    const std::array<std::array<double, 2>, 2>& matrix() const { return s_; }
    const BregmanFunction& marginal(std::size_t axis) const { return fx_.at(axis); }

    bool contains(const Vec2& p) const {
        if (kind_ != Divergence2DKind::AdditiveMarginal)
            return std::isfinite(p[0]) && std::isfinite(p[1]);
        return fx_[0].contains(p[0]) && fx_[1].contains(p[1]);
    }

    double phi2(const Vec2& xi, const Vec2& x) const {
        switch (kind_) {
            case Divergence2DKind::SquaredNorm2: {
                const double d0 = xi[0] - x[0], d1 = xi[1] - x[1];
                return d0 * d0 + d1 * d1;
            }
            case Divergence2DKind::Mahalanobis: {
                const double d0 = xi[0] - x[0], d1 = xi[1] - x[1];
                return s_[0][0] * d0 * d0 + 2.0 * s_[0][1] * d0 * d1 + s_[1][1] * d1 * d1;
            }
            case Divergence2DKind::AdditiveMarginal:
                return fx_[0].phi(xi[0], x[0]) + fx_[1].phi(xi[1], x[1]);
        }
        return 0.0;
    }

private:
    explicit Divergence2D(Divergence2DKind k) : kind_(k) {}

    Divergence2DKind kind_;
    std::array<std::array<double, 2>, 2> s_{{{1.0, 0.0}, {0.0, 1.0}}};
    std::vector<BregmanFunction> fx_;
};

struct Codebook2D {
    std::vector<Vec2> codes;
};

struct Assignment2D {
    std::vector<std::size_t> index; // per sample, the argmin code
    double distortion = 0.0;        // mean of the per-sample minima
};

struct Iteration2D {
    double distortion;
    bool reseeded;
};

struct RunTrace2D {
    std::vector<Iteration2D> steps;
    bool converged = false;
    int iterations = 0;
};

struct Lloyd2DConfig {
    int max_iter = 1000;
    int threads = 1; // assignment fan-out; results independent of the value
};

namespace detail {

template <class Work>
inline void parallel_over(std::size_t count, int threads, Work&& work) {
    const int usable =
        std::max(1, std::min<int>(threads, static_cast<int>(std::thread::hardware_concurrency())));
    if (usable <= 1 || count < 1024) {
        work(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + usable - 1) / usable;
    for (int t = 0; t < usable; ++t) {
        const std::size_t lo = chunk * static_cast<std::size_t>(t);
        if (lo >= count) break;
        const std::size_t hi = std::min(count, lo + chunk);
        pool.emplace_back([&work, lo, hi] { work(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

/// Nearest-code assignment; ties resolve to the lowest code index. The
/// distortion reduction runs in sample order, so the result does not depend
/// on the thread count.
inline Assignment2D assign(const Divergence2D& dv, const SampleSet2D& samples,
                           const Codebook2D& cb, int threads = 1) {
    if (cb.codes.empty()) throw DomainError("assign: empty codebook");
    if (samples.points.empty()) throw DomainError("assign: empty sample set");
    Assignment2D out;
    out.index.resize(samples.points.size());
    std::vector<double> best(samples.points.size());
    detail::parallel_over(samples.points.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) {
            std::size_t arg = 0;
            double bv = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < cb.codes.size(); ++c) {
                const double v = dv.phi2(samples.points[s], cb.codes[c]);
                if (v < bv) {
                    bv = v;
                    arg = c;
                }
            }
            out.index[s] = arg;
            best[s] = bv;
        }
    });
    double sum = 0.0;
    for (double v : best) sum += v;
    out.distortion = sum / static_cast<double>(best.size());
    return out;
}

namespace detail {

// Divergence-proportional seeding: first code uniform over the samples, each
// next code drawn with probability proportional to the current minimal
// divergence to the chosen set.
inline Codebook2D seed_codes(const Divergence2D& dv, const SampleSet2D& samples, std::size_t n,
                             std::mt19937_64& rng) {
    const auto& pts = samples.points;
    Codebook2D cb;
    cb.codes.reserve(n);
    cb.codes.push_back(pts[rng() % pts.size()]);
    std::vector<double> dist(pts.size());
    for (std::size_t s = 0; s < pts.size(); ++s) dist[s] = dv.phi2(pts[s], cb.codes[0]);
    while (cb.codes.size() < n) {
        double total = 0.0;
        for (double v : dist) total += v;
        std::size_t pick = 0;
        if (total > 0.0) {
            const double u = uniform_open(rng) * total;
            double acc = 0.0;
            pick = pts.size() - 1;
            for (std::size_t s = 0; s < pts.size(); ++s) {
                acc += dist[s];
                if (acc >= u) {
                    pick = s;
                    break;
                }
            }
        } else {
            pick = rng() % pts.size(); // all mass on the codes already chosen
        }
        cb.codes.push_back(pts[pick]);
        for (std::size_t s = 0; s < pts.size(); ++s)
            dist[s] = std::min(dist[s], dv.phi2(pts[s], cb.codes.back()));
    }
    return cb;
}

} // namespace detail

struct Lloyd2DResult {
    Codebook2D codebook;
    Assignment2D assignment;
    RunTrace2D trace;
};

/// Sample-based Lloyd iteration. For every divergence here the r = 2 cell
/// optimum is the plain cluster mean, so each sweep is assign + means.
/// Empty clusters re-seed at the sample farthest from its code (the sweep is
/// flagged in the trace; the distortion may rise there). Converges when an
/// assignment sweep leaves the partition unchanged, at which point every
/// code equals its cluster mean exactly.
inline Lloyd2DResult lloyd2d(const Divergence2D& dv, const SampleSet2D& samples, std::size_t n,
                             std::uint64_t seed, const Lloyd2DConfig& cfg = {}) {
    if (n == 0) throw DomainError("lloyd2d: n must be positive");
    if (samples.points.size() < n)
        throw DomainError("lloyd2d: fewer samples than codes");
    for (const auto& p : samples.points)
        if (!dv.contains(p)) throw DomainError("lloyd2d: sample outside divergence domain");
    std::mt19937_64 rng(seed);
    Lloyd2DResult res;
    res.codebook = detail::seed_codes(dv, samples, n, rng);
    res.assignment = assign(dv, samples, res.codebook, cfg.threads);
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        // means in fixed sample order: deterministic reduction
        std::vector<Vec2> sum(n, Vec2{0.0, 0.0});
        std::vector<std::size_t> count(n, 0);
        for (std::size_t s = 0; s < samples.points.size(); ++s) {
            const std::size_t c = res.assignment.index[s];
            sum[c][0] += samples.points[s][0];
            sum[c][1] += samples.points[s][1];
            ++count[c];
        }
        bool reseeded = false;
        Codebook2D next;
        next.codes.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            if (count[c] == 0) {
                // farthest sample from its current code takes over the slot
                std::size_t far = 0;
                double fv = -1.0;
                for (std::size_t s = 0; s < samples.points.size(); ++s) {
                    const double v =
                        dv.phi2(samples.points[s], res.codebook.codes[res.assignment.index[s]]);
                    if (v > fv) {
                        fv = v;
                        far = s;
                    }
                }
                next.codes[c] = samples.points[far];
                reseeded = true;
            } else {
                next.codes[c] = {sum[c][0] / static_cast<double>(count[c]),
                                 sum[c][1] / static_cast<double>(count[c])};
            }
        }
        Assignment2D na = assign(dv, samples, next, cfg.threads);
        res.trace.steps.push_back({na.distortion, reseeded});
        res.trace.iterations = iter + 1;
        const bool stable = !reseeded && na.index == res.assignment.index;
        res.codebook = std::move(next);
        res.assignment = std::move(na);
        if (stable) {
            res.trace.converged = true;
            return res;
        }
    }
    return res;
}

} // namespace bregquant
