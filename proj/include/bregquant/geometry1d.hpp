#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bregquant/divergence.hpp"
#include "bregquant/errors.hpp"

namespace bregquant {

/// Strictly increasing codes inside the generator domain.
struct Codebook1D {
    std::vector<double> codes;

    std::size_t size() const { return codes.size(); }

    void validate(const BregmanFunction& fn) const {
        if (codes.empty()) throw DomainError("codebook: empty");
        double scale = 1.0;
        for (double c : codes) scale = std::max(scale, std::abs(c));
        for (std::size_t i = 0; i < codes.size(); ++i) {
            fn.check_inside(codes[i], "codebook");
            if (i > 0 && !(codes[i] - codes[i - 1] > 1e-10 * scale))
                throw DegenerateCodes("codebook: codes " + std::to_string(i - 1) + " and " +
                                      std::to_string(i) + " not separated");
        }
    }
};

/// cuts[0] = a, cuts[i] = boundary(x_i, x_{i+1}), cuts[n] = b. Cell i of the
/// codebook is [cuts[i], cuts[i+1]].
struct CellBoundaries {
    std::vector<double> cuts;
    bool clamped = false; // some interior cut collided with a support endpoint
};

/// The point where phi(., u) and phi(., v) cross, for u < v:
///   boundary = (F(u) - F(v) - u F'(u) + v F'(v)) / (F'(v) - F'(u)),
/// which always lies in (u, v) for the catalog generators. Every xi below it
/// is divergence-closer to u, every xi above closer to v. Near the diagonal
/// the formula degrades to 0/0 and the midpoint expansion takes over.
inline double boundary(const BregmanFunction& fn, double u, double v) {
    fn.check_inside(u, "boundary");
    fn.check_inside(v, "boundary");
    if (u > v) std::swap(u, v);
    const double scale = std::max({1.0, std::abs(u), std::abs(v)});
    if (v - u < 1e-7 * scale) return 0.5 * (u + v);
    const double du = fn.f1(u), dv = fn.f1(v);
    if (!(std::abs(dv - du) > 1e-14 * (1.0 + std::abs(du))))
        throw DegenerateBoundary("boundary: F' gap below resolution");
    return (fn.f(u) - fn.f(v) - u * du + v * dv) / (dv - du);
}

/// Cell cuts for a codebook over support [a, b]. Cuts escaping [a, b] are
/// clamped and flagged; non-monotone cuts raise OrderingError.
inline CellBoundaries cells(const BregmanFunction& fn, const Codebook1D& cb, double a, double b) {
    cb.validate(fn);
    if (!(a < b)) throw DomainError("cells: empty support");
    const std::size_t n = cb.size();
    CellBoundaries out;
    out.cuts.resize(n + 1);
    out.cuts[0] = a;
    out.cuts[n] = b;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double c = boundary(fn, cb.codes[i], cb.codes[i + 1]);
        if (c < a) { c = a; out.clamped = true; }
        if (c > b) { c = b; out.clamped = true; }
        out.cuts[i + 1] = c;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(out.cuts[i] <= out.cuts[i + 1]))
            throw OrderingError("cells: cuts not monotone at index " + std::to_string(i));
    return out;
}

struct BoundaryPartials {
    double du; // d boundary / d u
    double dv; // d boundary / d v
};

/// Partials of the boundary map, u < v:
///   d_u = F''(u) phi(u,v) / (F'(v) - F'(u))^2,
///   d_v = F''(v) phi(v,u) / (F'(v) - F'(u))^2.
/// Both are nonnegative: moving either code drags the cut the same way.
inline BoundaryPartials boundary_partials(const BregmanFunction& fn, double u, double v) {
    if (!(u < v)) throw DomainError("boundary_partials: requires u < v");
    fn.check_inside(u, "boundary_partials");
    fn.check_inside(v, "boundary_partials");
    const double gap = fn.f1(v) - fn.f1(u);
    if (!(std::abs(gap) > 1e-14 * (1.0 + std::abs(fn.f1(u)))))
        throw DegenerateBoundary("boundary_partials: F' gap below resolution");
    const double g2 = gap * gap;
    return {fn.f2(u) * fn.phi(u, v) / g2, fn.f2(v) * fn.phi(v, u) / g2};
}

struct PsiPhi {
    double psi;     // d_u + d_v
    double phi_big; // F''(u) phi(u,v) + F''(v) phi(v,u) - (F'(v)-F'(u))^2
};

/// psi = 1 + phi_big / (F'(v) - F'(u))^2. The sign of phi_big follows the
/// log-curvature of F'': concave gives psi <= 1, convex gives psi >= 1, and
/// affine log F'' (quadratic, exponential) sits exactly at psi = 1. Only the
/// concave case feeds the Hessian line-sum bound.
inline PsiPhi psi_phi(const BregmanFunction& fn, double u, double v) {
    const auto p = boundary_partials(fn, u, v);
    const double gap = fn.f1(v) - fn.f1(u);
    const double phi_big = fn.f2(u) * fn.phi(u, v) + fn.f2(v) * fn.phi(v, u) - gap * gap;
    return {p.du + p.dv, phi_big};
}

} // namespace bregquant
