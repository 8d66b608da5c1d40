// Acceptance gate: one line per criterion, nonzero exit if any fail.
// Tolerances are pinned here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bregquant/bregquant.hpp"

using namespace bregquant;

namespace {

int failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("[%2d] %-34s %s%s%s\n", idx, name, pass ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

double unif(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

struct CatalogEntry {
    std::string name;
    BregmanFunction fn;
    double lo, hi;       // scan / sampling window inside the domain
    bool on_uniform01;   // compatible with U(0,1)
    bool on_trunc_gauss; // compatible with the truncated normal
};

std::vector<CatalogEntry> catalog() {
    return {
        {"squared_norm", BregmanFunction::squared_norm(), -5.0, 5.0, true, true},
        {"norm_like(1.5)", BregmanFunction::norm_like(1.5), 0.05, 5.0, true, false},
        {"norm_like(3)", BregmanFunction::norm_like(3.0), 0.05, 5.0, true, false},
        {"itakura_saito", BregmanFunction::itakura_saito(), 0.05, 5.0, true, false},
        {"kullback_leibler", BregmanFunction::kullback_leibler(), 0.05, 5.0, true, false},
        {"logistic", BregmanFunction::logistic(), 0.02, 0.98, true, false},
        {"soft_plus(1)", BregmanFunction::soft_plus(1.0), -5.0, 5.0, true, true},
        {"soft_plus(2)", BregmanFunction::soft_plus(2.0), -5.0, 5.0, true, true},
        {"soft_butterfly(1)", BregmanFunction::soft_butterfly(1.0), -5.0, 5.0, true, true},
        {"exponential(1)", BregmanFunction::exponential(1.0), -5.0, 5.0, true, true},
        {"exponential(-1)", BregmanFunction::exponential(-1.0), -5.0, 5.0, true, true},
    };
}

Density1D trunc_gauss() { return truncate_support(Density1D::gaussian(0.0, 1.0), 1e-12); }

// (fn, density, analytic mean) pairs every distribution-facing criterion runs over
struct MatrixEntry {
    std::string name;
    BregmanFunction fn;
    Density1D density;
    double mean;
};

std::vector<MatrixEntry> test_matrix() {
    std::vector<MatrixEntry> m;
    const auto u01 = Density1D::uniform(0.0, 1.0);
    const auto tg = trunc_gauss();
    for (const auto& e : catalog()) {
        if (e.on_uniform01) m.push_back({e.name + " x U(0,1)", e.fn, u01, 0.5});
        if (e.on_trunc_gauss) m.push_back({e.name + " x N(0,1)|trunc", e.fn, tg, 0.0});
    }
    return m;
}

// ---------------------------------------------------------------------------

void criterion_1_reference_table() {
    constexpr double tol = 5e-3;
    constexpr double budget_s = 30.0;
    const double a1[25] = {-2.7941, -2.1936, -1.8214, -1.5392, -1.3053, -1.1015, -0.9177,
                           -0.7479, -0.5882, -0.4356, -0.2878, -0.1432, 0.0000,  0.1432,
                           0.2878,  0.4356,  0.5882,  0.7479,  0.9177,  1.1015,  1.3053,
                           1.5392,  1.8214,  2.1936,  2.7941};
    const double a2[25] = {-2.4424, -1.8314, -1.4897, -1.2423, -1.0434, -0.8740, -0.7239,
                           -0.5873, -0.4602, -0.3399, -0.2242, -0.1114, 0.0000,  0.1114,
                           0.2242,  0.3399,  0.4602,  0.5873,  0.7239,  0.8740,  1.0434,
                           1.2423,  1.4897,  1.8314,  2.4424};
    const auto d = trunc_gauss();
    bool pass = true;
    std::ostringstream detail;
    for (const auto& [a, want] : {std::pair<double, const double*>{1.0, a1}, {2.0, a2}}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto res = lloyd(BregmanFunction::soft_plus(a), d, 25);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double worst = 0.0;
        for (int i = 0; i < 25; ++i)
            worst = std::max(worst, std::abs(res.codebook.codes[i] - want[i]));
        if (!res.trace.converged || worst > tol || secs > budget_s) pass = false;
        detail << "a=" << a << ": max|dx|=" << fmt(worst) << " in " << fmt(secs) << "s  ";
    }
    report(1, "reference table n=25 (a=1,2)", pass, detail.str());
}

void criterion_2_uniform_midpoints() {
    constexpr double code_tol = 1e-10;
    constexpr double g_rel_tol = 1e-10;
    const auto fn = BregmanFunction::squared_norm();
    const auto d = Density1D::uniform(0.0, 1.0);
    bool pass = true;
    double worst_code = 0.0, worst_g = 0.0;
    for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u}) {
        const auto res = lloyd(fn, d, n);
        if (!res.trace.converged) pass = false;
        for (std::size_t k = 1; k <= n; ++k)
            worst_code = std::max(
                worst_code, std::abs(res.codebook.codes[k - 1] -
                                     (2.0 * static_cast<double>(k) - 1.0) / (2.0 * n)));
        const double g = distortion(fn, d, res.codebook, 2.0).g;
        const double want = 1.0 / (12.0 * static_cast<double>(n * n));
        worst_g = std::max(worst_g, std::abs(g - want) / want);
    }
    pass = pass && worst_code <= code_tol && worst_g <= g_rel_tol;
    report(2, "uniform midpoint law n=1..32", pass,
           "max|dx|=" + fmt(worst_code) + " max relative dG=" + fmt(worst_g));
}

void criterion_3_single_code_law() {
    constexpr double mean_tol = 1e-9;
    constexpr double var_rel_tol = 1e-9;
    bool pass = true;
    double worst_mean = 0.0, worst_var = 0.0;
    std::string offender;
    for (const auto& e : test_matrix()) {
        const auto res = lloyd(e.fn, e.density, 1);
        const double dm = std::abs(res.codebook.codes[0] - e.mean);
        const double g = distortion(e.fn, e.density, res.codebook, 2.0).g;
        const double fv = f_variance(e.fn, e.density);
        const double dv = std::abs(g - fv) / fv;
        worst_mean = std::max(worst_mean, dm);
        worst_var = std::max(worst_var, dv);
        if (!res.trace.converged || dm > mean_tol || dv > var_rel_tol) {
            pass = false;
            if (offender.empty()) offender = e.name;
        }
    }
    report(3, "single-code mean law (full matrix)", pass,
           "max|x-EX|=" + fmt(worst_mean) + " max relative |G-var|=" + fmt(worst_var) +
               (offender.empty() ? "" : " first offender: " + offender));
}

void criterion_4_pythagoras() {
    constexpr double tol_scale = 1e-7; // gap <= tol_scale * (1 + G)
    bool pass = true;
    double worst = 0.0;
    std::string offender;
    for (const auto& e : test_matrix()) {
        for (std::size_t n : {1u, 2u, 5u}) {
            const auto res = lloyd(e.fn, e.density, n);
            if (!res.trace.converged) {
                pass = false;
                offender = e.name;
                continue;
            }
            const double g = distortion(e.fn, e.density, res.codebook, 2.0).g;
            const double gap = pythagoras_identity(e.fn, e.density, res.codebook);
            worst = std::max(worst, gap / (1.0 + g));
            if (gap > tol_scale * (1.0 + g)) {
                pass = false;
                if (offender.empty()) offender = e.name;
            }
        }
    }
    report(4, "pythagoras identity (matrix, n=1,2,5)", pass,
           "max scaled gap=" + fmt(worst) +
               (offender.empty() ? "" : " first offender: " + offender));
}

void criterion_5_symmetry() {
    constexpr double sym_tol = 1e-6;
    constexpr double pair_tol = 1e-6;
    const double pair_code = 0.7978845608028654; // sqrt(2/pi)
    const auto d = trunc_gauss();
    bool pass = true;
    double worst = 0.0, worst_pair = 0.0;
    for (double a : {1.0, 2.0}) {
        const auto fn = BregmanFunction::soft_plus(a);
        for (std::size_t n : {2u, 5u, 25u}) {
            const auto res = lloyd(fn, d, n);
            if (!res.trace.converged) pass = false;
            for (std::size_t i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(res.codebook.codes[i] +
                                                 res.codebook.codes[n - 1 - i]));
            if (n == 2)
                worst_pair = std::max(
                    worst_pair, std::max(std::abs(res.codebook.codes[0] + pair_code),
                                         std::abs(res.codebook.codes[1] - pair_code)));
        }
    }
    pass = pass && worst <= sym_tol && worst_pair <= pair_tol;
    report(5, "codebook symmetry (softplus a=1,2)", pass,
           "max|x_i+x_{n+1-i}|=" + fmt(worst) + " pair defect=" + fmt(worst_pair));
}

void criterion_6_gradient() {
    constexpr double rel_tol = 1e-5; // |ana-fd| <= rel_tol * max(1, |fd|)
    constexpr double step = 1e-5;
    struct Case {
        BregmanFunction fn;
        Density1D density;
        double lo, hi;
    };
    const std::vector<Case> cases = {
        {BregmanFunction::squared_norm(), trunc_gauss(), -3.0, 3.0},
        {BregmanFunction::soft_plus(1.0), trunc_gauss(), -3.0, 3.0},
        {BregmanFunction::itakura_saito(), Density1D::uniform(0.2, 3.0), 0.4, 2.8},
        {BregmanFunction::kullback_leibler(), Density1D::uniform(0.2, 3.0), 0.4, 2.8},
    };
    std::mt19937_64 rng(6001);
    bool pass = true;
    double worst = 0.0;
    for (const auto& c : cases) {
        for (int rep = 0; rep < 20; ++rep) {
            const std::size_t n = 2 + static_cast<std::size_t>(rep % 3);
            std::vector<double> codes;
            for (;;) {
                codes.clear();
                for (std::size_t i = 0; i < n; ++i) codes.push_back(unif(rng, c.lo, c.hi));
                std::sort(codes.begin(), codes.end());
                bool spaced = true;
                for (std::size_t i = 1; i < n; ++i)
                    if (codes[i] - codes[i - 1] < 0.08 * (c.hi - c.lo)) spaced = false;
                if (spaced) break;
            }
            const Codebook1D cb{codes};
            const auto ana = gradient(c.fn, c.density, cb, 2.0);
            for (std::size_t i = 0; i < n; ++i) {
                auto shifted = codes;
                shifted[i] += step;
                const double up = distortion(c.fn, c.density, Codebook1D{shifted}, 2.0).g;
                shifted[i] -= 2.0 * step;
                const double dn = distortion(c.fn, c.density, Codebook1D{shifted}, 2.0).g;
                const double fd = (up - dn) / (2.0 * step);
                const double err = std::abs(ana[i] - fd) / std::max(1.0, std::abs(fd));
                worst = std::max(worst, err);
                if (err > rel_tol) pass = false;
            }
        }
    }
    report(6, "gradient vs finite differences", pass, "max scaled error=" + fmt(worst));
}

void criterion_7_psi_and_hessian() {
    constexpr double psi_tol = 1.0 + 1e-10;
    constexpr double line_sum_floor = -1e-9;
    bool psi_ok = true;
    std::ostringstream over;
    for (const auto& e : catalog()) {
        const double p = psi_max_scan(e.fn, e.lo, e.hi);
        if (p > psi_tol) {
            psi_ok = false;
            over << (over.tellp() > 0 ? ", " : "") << e.name << "=" << fmt(p);
        }
    }
    bool hessian_ok = true;
    const auto sp = BregmanFunction::soft_plus(1.0);
    const auto d = trunc_gauss();
    double min_eig = 1e300, min_sum = 1e300;
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto res = lloyd(sp, d, n);
        if (!res.trace.converged) {
            hessian_ok = false;
            continue;
        }
        const auto h = hessian_positivity_at(sp, d, res.codebook);
        for (double s : h.line_sums) min_sum = std::min(min_sum, s);
        min_eig = std::min(min_eig, h.eigen_min);
        if (h.eigen_min <= 0.0) hessian_ok = false;
        for (double s : h.line_sums)
            if (s < line_sum_floor) hessian_ok = false;
    }
    const bool pass = psi_ok && hessian_ok;
    std::string detail = "hessian: min line sum=" + fmt(min_sum) +
                         ", min eigenvalue=" + fmt(min_eig) +
                         (hessian_ok ? " (ok)" : " (violated)");
    if (!psi_ok)
        detail = "psi_max exceeds 1 for generators with log-convex F'' [" + over.str() +
                 "]; log-concave entries all within bound; " + detail;
    else
        detail = "psi_max within bound for all entries; " + detail;
    report(7, "psi bound + hessian positivity", pass, detail);
}

void criterion_8_dominance_certificate() {
    std::mt19937_64 rng(8001);
    bool pass = true;
    double min_eig = 1e300;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 11);
        SymTridiagonal t;
        t.off.resize(n - 1);
        for (auto& o : t.off) o = -unif(rng, 0.01, 1.0);
        t.diag.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double radius = (i > 0 ? -t.off[i - 1] : 0.0) + (i + 1 < n ? -t.off[i] : 0.0);
            const double slack = i == 0 ? unif(rng, 0.01, 0.5) : unif(rng, 0.0, 0.5);
            t.diag[i] = radius + slack;
        }
        if (!gershgorin_positive(t)) pass = false;
        const double e = min_eigenvalue(t);
        min_eig = std::min(min_eig, e);
        if (!(e > 0.0)) pass = false;
    }
    SymTridiagonal zero_sums;
    zero_sums.diag = {1.0, 1.0};
    zero_sums.off = {-1.0};
    SymTridiagonal positive_off;
    positive_off.diag = {2.0, 2.0};
    positive_off.off = {1.0};
    const bool rejects = !gershgorin_positive(zero_sums) && !gershgorin_positive(positive_off);
    pass = pass && rejects;
    report(8, "row-dominance eigenvalue certificate", pass,
           "min eigenvalue over 100 draws=" + fmt(min_eig) +
               (rejects ? ", counterexample shapes rejected" : ", counterexample NOT rejected"));
}

void criterion_9_level_monotonicity() {
    bool pass = true;
    std::string offender;
    for (const auto& e : test_matrix()) {
        const auto g = level_monotonicity(e.fn, e.density, 10);
        for (std::size_t i = 1; i < g.size(); ++i)
            if (!(g[i] < g[i - 1])) {
                pass = false;
                if (offender.empty()) offender = e.name;
            }
    }
    report(9, "level monotonicity n=1..10 (matrix)", pass,
           offender.empty() ? "strictly decreasing everywhere" : "violated at " + offender);
}

void criterion_10_identities() {
    constexpr double tol = 1e-12; // |lhs-rhs| <= tol * (1 + |lhs|)
    std::mt19937_64 rng(10001);
    bool pass = true;
    double worst3 = 0.0, worst_bf = 0.0;
    for (const auto& e : catalog()) {
        for (int rep = 0; rep < 1000; ++rep) {
            const double xi = unif(rng, e.lo, e.hi);
            const double x = unif(rng, e.lo, e.hi);
            const double y = unif(rng, e.lo, e.hi);
            const double lhs = e.fn.phi(xi, x);
            const double rhs =
                e.fn.phi(xi, y) + e.fn.phi(y, x) + (e.fn.f1(y) - e.fn.f1(x)) * (xi - y);
            const double err = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
            worst3 = std::max(worst3, err);
            if (err > tol) pass = false;
        }
    }
    for (int rep = 0; rep < 1000; ++rep) {
        const double a = unif(rng, 0.5, 2.0);
        const auto bf = BregmanFunction::soft_butterfly(a);
        const auto sp = BregmanFunction::soft_plus(2.0 * a);
        const double xi = unif(rng, -5.0, 5.0);
        const double x = unif(rng, -5.0, 5.0);
        const double lhs = bf.phi(xi, x);
        const double rhs = 2.0 * sp.phi(xi, x);
        const double err = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
        worst_bf = std::max(worst_bf, err);
        if (err > tol) pass = false;
    }
    report(10, "three-point + butterfly identities", pass,
           "max scaled errors " + fmt(worst3) + " / " + fmt(worst_bf));
}

std::array<std::array<double, 2>, 2> sqrt_spd2(const std::array<std::array<double, 2>, 2>& s) {
    const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    const double rd = std::sqrt(det);
    const double scale = std::sqrt(s[0][0] + s[1][1] + 2.0 * rd);
    return {{{(s[0][0] + rd) / scale, s[0][1] / scale},
             {s[1][0] / scale, (s[1][1] + rd) / scale}}};
}

void criterion_11_planar_suite() {
    constexpr double descent_slack = 1e-12;
    constexpr double centroid_tol = 1e-12;
    bool descent_ok = true;
    {
        const auto set = sample_2d({{0.0, 0.0}, {{{1.0, 0.4}, {0.4, 1.5}}}}, 4000, 113);
        const auto dv = Divergence2D::squared_norm();
        for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
            const auto res = lloyd2d(dv, set, 9, seed);
            for (std::size_t i = 1; i < res.trace.steps.size(); ++i)
                if (!res.trace.steps[i].reseeded &&
                    res.trace.steps[i].distortion >
                        res.trace.steps[i - 1].distortion + descent_slack)
                    descent_ok = false;
        }
    }
    bool conjugacy_ok = true;
    {
        const std::array<std::array<double, 2>, 2> s{{{2.0, 0.5}, {0.5, 1.0}}};
        const auto root = sqrt_spd2(s);
        const auto set = sample_2d({{0.0, 0.0}, {{{1.0, 0.2}, {0.2, 1.0}}}}, 1000, 211);
        Codebook2D cb{{{-0.9, 0.1}, {0.8, 0.7}, {0.1, -1.0}, {0.3, 0.4}}};
        const auto direct = assign(Divergence2D::mahalanobis(s), set, cb);
        SampleSet2D tset;
        for (const auto& p : set.points)
            tset.points.push_back({root[0][0] * p[0] + root[0][1] * p[1],
                                   root[1][0] * p[0] + root[1][1] * p[1]});
        Codebook2D tcb;
        for (const auto& c : cb.codes)
            tcb.codes.push_back({root[0][0] * c[0] + root[0][1] * c[1],
                                 root[1][0] * c[0] + root[1][1] * c[1]});
        const auto conj = assign(Divergence2D::squared_norm(), tset, tcb);
        conjugacy_ok = direct.index == conj.index;
    }
    bool figure_ok = true;
    double worst_centroid = 0.0;
    std::size_t min_count = 0;
    {
        const auto set = sample_2d({{0.5, 1.0}, {{{0.25, 0.0}, {0.0, 0.25}}}}, 10000, 7);
        const auto dv = Divergence2D::additive(BregmanFunction::soft_plus(1.0),
                                               BregmanFunction::soft_plus(1.0));
        const auto res = lloyd2d(dv, set, 41, 7);
        figure_ok = res.trace.converged;
        std::vector<Vec2> sum(41, Vec2{0.0, 0.0});
        std::vector<std::size_t> count(41, 0);
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            const auto c = res.assignment.index[i];
            sum[c][0] += set.points[i][0];
            sum[c][1] += set.points[i][1];
            ++count[c];
        }
        min_count = *std::min_element(count.begin(), count.end());
        if (min_count == 0) figure_ok = false;
        for (std::size_t c = 0; c < 41 && figure_ok; ++c) {
            worst_centroid = std::max(
                worst_centroid,
                std::max(std::abs(res.codebook.codes[c][0] -
                                  sum[c][0] / static_cast<double>(count[c])),
                         std::abs(res.codebook.codes[c][1] -
                                  sum[c][1] / static_cast<double>(count[c]))));
        }
        if (worst_centroid > centroid_tol) figure_ok = false;
    }
    const bool pass = descent_ok && conjugacy_ok && figure_ok;
    report(11, "2d property suite", pass,
           std::string("descent ") + (descent_ok ? "ok" : "violated") + ", conjugacy " +
               (conjugacy_ok ? "exact" : "broken") + ", n=41 min cluster " +
               std::to_string(min_count) + ", centroid defect " + fmt(worst_centroid));
}

} // namespace

int main() {
    try {
        criterion_1_reference_table();
        criterion_2_uniform_midpoints();
        criterion_3_single_code_law();
        criterion_4_pythagoras();
        criterion_5_symmetry();
        criterion_6_gradient();
        criterion_7_psi_and_hessian();
        criterion_8_dominance_certificate();
        criterion_9_level_monotonicity();
        criterion_10_identities();
        criterion_11_planar_suite();
    } catch (const std::exception& e) {
        std::printf("aborted: %s\n", e.what());
        return 1;
    }
    std::printf("criteria passed: %d/11\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
