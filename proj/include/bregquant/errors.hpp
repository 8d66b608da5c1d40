#pragma once

#include <stdexcept>
#include <string>

namespace bregquant {

/// Argument outside the open domain of a generator or density.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive integration ran out of refinement depth before reaching tolerance.
struct QuadratureError : std::runtime_error {
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// F'(u) and F'(v) too close to define the cell boundary between u and v.
struct DegenerateBoundary : std::runtime_error {
    explicit DegenerateBoundary(const std::string& what) : std::runtime_error(what) {}
};

/// Computed cell cuts are not monotone (codes too close under this generator).
struct OrderingError : std::runtime_error {
    explicit OrderingError(const std::string& what) : std::runtime_error(what) {}
};

/// Two codes closer than the resolution limit.
struct DegenerateCodes : std::runtime_error {
    explicit DegenerateCodes(const std::string& what) : std::runtime_error(what) {}
};

/// Weighted cell mass underflowed (empty or measure-zero cell).
struct ZeroWeightCell : std::runtime_error {
    explicit ZeroWeightCell(const std::string& what) : std::runtime_error(what) {}
};

/// Descent step merged or reordered codes.
struct OrderCollapse : std::runtime_error {
    explicit OrderCollapse(const std::string& what) : std::runtime_error(what) {}
};

/// Operation requires a stationary codebook and the residual is too large.
struct NotStationary : std::runtime_error {
    explicit NotStationary(const std::string& what) : std::runtime_error(what) {}
};

/// Caller-supplied Lipschitz/convexity constants contradict the computed value.
struct BoundViolation : std::runtime_error {
    explicit BoundViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix input is not symmetric tridiagonal.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or schema-violating run configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bregquant
