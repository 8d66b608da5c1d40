#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "bregquant/errors.hpp"

namespace bregquant {

/// Symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }

    void validate() const {
        if (diag.empty()) throw ShapeError("tridiagonal: empty matrix");
        if (off.size() + 1 != diag.size())
            throw ShapeError("tridiagonal: off-diagonal size mismatch");
    }

    /// Row sums a_ii + a_{i,i-1} + a_{i,i+1}.
    std::vector<double> line_sums() const {
        validate();
        std::vector<double> s(diag);
        for (std::size_t i = 0; i + 1 < diag.size(); ++i) {
            s[i] += off[i];
            s[i + 1] += off[i];
        }
        return s;
    }

    /// Dense input, checked for shape: square, symmetric, zero outside the
    /// three central diagonals (tolerance 1e-12 * max entry).
    static SymTridiagonal from_dense(const std::vector<std::vector<double>>& a) {
        const std::size_t n = a.size();
        if (n == 0) throw ShapeError("from_dense: empty matrix");
        double scale = 0.0;
        for (const auto& row : a) {
            if (row.size() != n) throw ShapeError("from_dense: not square");
            for (double v : row) scale = std::max(scale, std::abs(v));
        }
        const double tol = 1e-12 * std::max(1.0, scale);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (std::abs(a[i][j] - a[j][i]) > tol)
                    throw ShapeError("from_dense: not symmetric");
                if (j > i + 1 && std::abs(a[i][j]) > tol)
                    throw ShapeError("from_dense: not tridiagonal");
            }
        SymTridiagonal t;
        t.diag.resize(n);
        t.off.resize(n - 1);
        for (std::size_t i = 0; i < n; ++i) t.diag[i] = a[i][i];
        for (std::size_t i = 0; i + 1 < n; ++i) t.off[i] = a[i][i + 1];
        return t;
    }
};

namespace detail {

// Number of eigenvalues of T strictly below x (Sturm count via the LDL^T
// pivot signs, with the usual zero-pivot safeguard).
inline std::size_t sturm_count(const SymTridiagonal& t, double x) {
    const std::size_t n = t.size();
    const double tiny = std::numeric_limits<double>::min() * 4.0;
    std::size_t count = 0;
    double q = t.diag[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(q) < tiny) q = q < 0.0 ? -tiny : tiny;
        q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

} // namespace detail

/// All eigenvalues in ascending order, each located by Sturm bisection
/// inside the Gershgorin enclosure. Deterministic: no pivoting choices, no
/// iteration-order dependence.
inline std::vector<double> eigenvalues(const SymTridiagonal& t) {
    t.validate();
    const std::size_t n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(t.off[i - 1]);
        if (i + 1 < n) radius += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - radius);
        hi = std::max(hi, t.diag[i] + radius);
    }
    const double span = std::max(hi - lo, 1.0);
    lo -= 1e-12 * span;
    hi += 1e-12 * span;
    std::vector<double> eig(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            (detail::sturm_count(t, m) <= k ? a : b) = m;
        }
        eig[k] = 0.5 * (a + b);
    }
    return eig;
}

inline double min_eigenvalue(const SymTridiagonal& t) { return eigenvalues(t).front(); }

/// Sufficient positivity test: nonnegative diagonal, strictly negative
/// off-diagonal, nonnegative row sums, and a strictly positive row sum at
/// one of the two ends together force every eigenvalue positive.
inline bool gershgorin_positive(const SymTridiagonal& t) {
    t.validate();
    for (double v : t.diag)
        if (!(v >= 0.0)) return false;
    for (double v : t.off)
        if (!(v < 0.0)) return false;
    const auto sums = t.line_sums();
    for (double s : sums)
        if (!(s >= 0.0)) return false;
    return sums.front() > 0.0 || sums.back() > 0.0;
}

} // namespace bregquant
