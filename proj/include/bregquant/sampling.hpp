#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bregquant/errors.hpp"

namespace bregquant {

using Vec2 = std::array<double, 2>;

/// Gaussian source for the 2D pipeline. positive_quadrant draws by rejection,
/// i.e. samples the Gaussian conditioned on (0,inf)^2.
struct Sample2DDescriptor {
    Vec2 mean{0.0, 0.0};
    std::array<std::array<double, 2>, 2> cov{{{1.0, 0.0}, {0.0, 1.0}}};
    bool positive_quadrant = false;
};

struct SampleSet2D {
    std::vector<Vec2> points;
    std::uint64_t seed = 0;
    Sample2DDescriptor source;
};

namespace detail {

// Lower Cholesky factor of a 2x2 SPD matrix.
inline std::array<double, 3> cholesky2(const std::array<std::array<double, 2>, 2>& s) {
    if (s[0][1] != s[1][0]) throw DomainError("cholesky2: matrix not symmetric");
    if (!(s[0][0] > 0.0)) throw DomainError("cholesky2: matrix not positive definite");
    const double l11 = std::sqrt(s[0][0]);
    const double l21 = s[0][1] / l11;
    const double rest = s[1][1] - l21 * l21;
    if (!(rest > 0.0)) throw DomainError("cholesky2: matrix not positive definite");
    return {l11, l21, std::sqrt(rest)};
}

// mt19937_64 output mapped to (0, 1]; the generator sequence is fixed by the
// standard, so sampling is reproducible across platforms.
inline double uniform_open(std::mt19937_64& rng) {
    return 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller pair from two uniforms; spelled out (rather than
// std::normal_distribution) because the latter is implementation-defined.
inline std::array<double, 2> box_muller(std::mt19937_64& rng) {
    const double u1 = uniform_open(rng);
    const double u2 = uniform_open(rng);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

} // namespace detail

/// Draw count points from the descriptor; identical seeds give identical sets.
inline SampleSet2D sample_2d(const Sample2DDescriptor& desc, std::size_t count,
                             std::uint64_t seed) {
    if (count == 0) throw DomainError("sample_2d: count must be positive");
    const auto l = detail::cholesky2(desc.cov);
    std::mt19937_64 rng(seed);
    SampleSet2D out;
    out.seed = seed;
    out.source = desc;
    out.points.reserve(count);
    // Rejection guard: the positive quadrant must retain visible mass.
    std::size_t rejected = 0;
    const std::size_t reject_budget = 1000 * count + 1000000;
    while (out.points.size() < count) {
        const auto z = detail::box_muller(rng);
        const Vec2 p{desc.mean[0] + l[0] * z[0], desc.mean[1] + l[1] * z[0] + l[2] * z[1]};
        if (desc.positive_quadrant && !(p[0] > 0.0 && p[1] > 0.0)) {
            if (++rejected > reject_budget)
                throw DomainError("sample_2d: rejection budget exhausted");
            continue;
        }
        out.points.push_back(p);
    }
    return out;
}

} // namespace bregquant
