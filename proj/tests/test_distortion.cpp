#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bregquant/distortion.hpp"
#include "bregquant/solver.hpp"
#include "oracles.hpp"

using namespace bregquant;
using Catch::Approx;

TEST_CASE("distortion closed forms on the uniform law", "[distortion]") {
    auto fn = BregmanFunction::squared_norm();
    auto d = Density1D::uniform(0.0, 1.0);
    SECTION("single mid code") {
        const auto rep = distortion(fn, d, Codebook1D{{0.5}}, 2.0);
        REQUIRE(rep.g == Approx(1.0 / 12.0).epsilon(1e-10));
        REQUIRE(rep.e == Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-10));
        REQUIRE(rep.per_cell.size() == 1);
        REQUIRE(rep.per_cell[0].mass == Approx(1.0).epsilon(1e-10));
    }
    SECTION("optimal grid of four") {
        Codebook1D cb{{1.0 / 8, 3.0 / 8, 5.0 / 8, 7.0 / 8}};
        const auto rep = distortion(fn, d, cb, 2.0);
        REQUIRE(rep.g == Approx(1.0 / 192.0).epsilon(1e-10));
        double total = 0.0;
        for (const auto& c : rep.per_cell) total += c.contribution;
        REQUIRE(rep.g == Approx(total).margin(1e-15));
    }
    SECTION("other exponents, same code") {
        // integral of |xi - 1/2|^r over [0,1] is 2 (1/2)^{r+1} / (r+1)
        REQUIRE(distortion(fn, d, Codebook1D{{0.5}}, 4.0).g ==
                Approx(1.0 / 80.0).epsilon(1e-9));
        REQUIRE(distortion(fn, d, Codebook1D{{0.5}}, 1.0).g ==
                Approx(0.25).epsilon(1e-9));
        REQUIRE(distortion(fn, d, Codebook1D{{0.5}}, 4.0).e ==
                Approx(std::pow(1.0 / 80.0, 0.25)).epsilon(1e-9));
    }
    SECTION("r must be positive") {
        REQUIRE_THROWS_AS(distortion(fn, d, Codebook1D{{0.5}}, 0.0), DomainError);
        REQUIRE_THROWS_AS(distortion(fn, d, Codebook1D{{0.5}}, -1.0), DomainError);
    }
}

TEST_CASE("one code at the mean realizes the F-variance", "[distortion]") {
    struct Case {
        BregmanFunction fn;
        Density1D d;
    };
    const Case cases[] = {
        {BregmanFunction::squared_norm(), Density1D::uniform(0.0, 1.0)},
        {BregmanFunction::kullback_leibler(), Density1D::uniform(1.0, 2.0)},
        {BregmanFunction::itakura_saito(), Density1D::uniform(0.5, 1.5)},
        {BregmanFunction::soft_plus(1.0),
         Density1D::truncated_gaussian(0.0, 1.0, -6.0, 6.0)},
    };
    for (const auto& c : cases) {
        const auto [mass, mom] =
            cell_moments(c.d, {}, c.d.support_lo(), c.d.support_hi());
        const double mean = mom / mass;
        const auto rep = distortion(c.fn, c.d, Codebook1D{{mean}}, 2.0);
        REQUIRE(rep.g == Approx(f_variance(c.fn, c.d)).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("f-variance values", "[distortion]") {
    SECTION("quadratic generator reduces to the variance") {
        REQUIRE(f_variance(BregmanFunction::squared_norm(), Density1D::uniform(0.0, 1.0)) ==
                Approx(1.0 / 12.0).epsilon(1e-10));
        auto trunc = truncate_support(Density1D::gaussian(0.0, 1.0), 1e-12);
        REQUIRE(f_variance(BregmanFunction::squared_norm(), trunc) ==
                Approx(1.0).margin(1e-6));
    }
    SECTION("entropy generator on a shifted window") {
        // frozen: integral of xi ln xi over (1,2) minus 1.5 ln 1.5,
        // cross-checked against a high-resolution sum below
        const double got =
            f_variance(BregmanFunction::kullback_leibler(), Density1D::uniform(1.0, 2.0));
        REQUIRE(got == Approx(0.0280966989576440).margin(1e-12));
        const double by_sum = oracle::simpson(
            [](double x) { return x * std::log(x); }, 1.0, 2.0, 20001);
        REQUIRE(got == Approx(by_sum - 1.5 * std::log(1.5)).margin(1e-10));
    }
    SECTION("nonnegative across the catalog") {
        auto d = Density1D::uniform(0.25, 0.75);
        for (auto fn : {BregmanFunction::squared_norm(), BregmanFunction::itakura_saito(),
                        BregmanFunction::kullback_leibler(), BregmanFunction::logistic(),
                        BregmanFunction::soft_plus(2.0), BregmanFunction::norm_like(1.5)}) {
            REQUIRE(f_variance(fn, d) >= 0.0);
        }
    }
    SECTION("unbounded support is refused") {
        REQUIRE_THROWS_AS(
            f_variance(BregmanFunction::squared_norm(), Density1D::gaussian(0.0, 1.0)),
            DomainError);
    }
}

TEST_CASE("gradient closed form and stationarity", "[distortion]") {
    auto fn = BregmanFunction::squared_norm();
    auto d = Density1D::uniform(0.0, 1.0);
    SECTION("hand integrals") {
        // cells are [0, 1/2], [1/2, 1]; component i is
        // 2 integral of (x_i - xi) over the cell
        const auto g = gradient(fn, d, Codebook1D{{0.3, 0.7}}, 2.0);
        REQUIRE(g[0] == Approx(0.05).margin(1e-10));
        REQUIRE(g[1] == Approx(-0.05).margin(1e-10));
    }
    SECTION("zero at a stationary codebook") {
        const auto g = gradient(fn, d, Codebook1D{{0.25, 0.75}}, 2.0);
        REQUIRE(std::abs(g[0]) <= 1e-8);
        REQUIRE(std::abs(g[1]) <= 1e-8);
    }
    SECTION("r below two is refused") {
        REQUIRE_THROWS_AS(gradient(fn, d, Codebook1D{{0.5}}, 1.5), DomainError);
    }
}

TEST_CASE("gradient matches finite differences of the distortion", "[distortion]") {
    std::mt19937_64 rng(171);
    auto check = [&](const BregmanFunction& fn, const Density1D& d, double lo, double hi) {
        for (int rep = 0; rep < 5; ++rep) {
            const double a = oracle::uniform(rng, lo, lo + 0.3 * (hi - lo));
            const double b = oracle::uniform(rng, lo + 0.55 * (hi - lo), hi);
            Codebook1D cb{{a, 0.5 * (a + b), b}};
            const auto g = gradient(fn, d, cb, 2.0);
            for (std::size_t i = 0; i < cb.size(); ++i) {
                const double h = 1e-5 * std::max(1.0, std::abs(cb.codes[i]));
                const double fd = oracle::central_diff(
                    [&](double t) {
                        Codebook1D moved = cb;
                        moved.codes[i] = t;
                        return distortion(fn, d, moved, 2.0).g;
                    },
                    cb.codes[i], h);
                REQUIRE(g[i] == Approx(fd).epsilon(1e-5).margin(1e-9));
            }
        }
    };
    auto trunc = truncate_support(Density1D::gaussian(0.0, 1.0), 1e-12);
    check(BregmanFunction::squared_norm(), trunc, -2.0, 2.0);
    check(BregmanFunction::soft_plus(1.0), trunc, -2.0, 2.0);
    check(BregmanFunction::itakura_saito(), Density1D::uniform(0.2, 3.0), 0.3, 2.8);
    check(BregmanFunction::kullback_leibler(), Density1D::uniform(0.2, 3.0), 0.3, 2.8);
}

TEST_CASE("gradient equals curvature times mass times residual", "[distortion]") {
    auto fn = BregmanFunction::soft_plus(1.0);
    auto d = Density1D::truncated_gaussian(0.0, 1.0, -5.0, 5.0);
    Codebook1D cb{{-1.2, -0.1, 0.8, 2.0}};
    const auto g = gradient(fn, d, cb, 2.0);
    const auto bounds = cells(fn, cb, d.support_lo(), d.support_hi());
    for (std::size_t i = 0; i < cb.size(); ++i) {
        const auto [mass, mom] = cell_moments(d, {}, bounds.cuts[i], bounds.cuts[i + 1]);
        const double want = fn.f2(cb.codes[i]) * mass * (cb.codes[i] - mom / mass);
        REQUIRE(g[i] == Approx(want).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("hessian line sums", "[distortion]") {
    SECTION("uniform pair, quadratic generator") {
        // h = 1, psi = 1, cuts {0, 1/2, 1}: each line is 2 (1/2 - 1/4) = 1/2
        auto fn = BregmanFunction::squared_norm();
        auto d = Density1D::uniform(0.0, 1.0);
        const auto s = hessian_line_sums(fn, d, Codebook1D{{0.25, 0.75}});
        REQUIRE(s.size() == 2);
        REQUIRE(s[0] == Approx(0.5).margin(1e-9));
        REQUIRE(s[1] == Approx(0.5).margin(1e-9));
    }
    SECTION("single code has no boundary terms") {
        auto fn = BregmanFunction::kullback_leibler();
        auto d = Density1D::uniform(1.0, 2.0);
        const auto s = hessian_line_sums(fn, d, Codebook1D{{1.5}});
        REQUIRE(s.size() == 1);
        REQUIRE(s[0] == Approx(fn.f2(1.5)).epsilon(1e-9));
    }
    SECTION("refuses non-stationary codebooks") {
        auto fn = BregmanFunction::squared_norm();
        auto d = Density1D::uniform(0.0, 1.0);
        REQUIRE_THROWS_AS(hessian_line_sums(fn, d, Codebook1D{{0.1, 0.4}}), NotStationary);
    }
    SECTION("nonnegative after convergence, log-concave curvature") {
        auto fn = BregmanFunction::soft_plus(1.0);
        auto trunc = truncate_support(Density1D::gaussian(0.0, 1.0), 1e-12);
        const auto res = lloyd(fn, trunc, 5);
        const auto s = hessian_line_sums(fn, trunc, res.codebook);
        for (double v : s) REQUIRE(v >= -1e-9);
        // outer lines carry the uncancelled boundary surplus
        REQUIRE(s.front() > 0.0);
        REQUIRE(s.back() > 0.0);
    }
}
