#pragma once

#include <stdexcept>
#include <string>

namespace sysgeom {

/// Base for failures of the numerical machinery (divergence, poles on the
/// contour, non-convergent quadrature, ...). Input/usage mistakes throw
/// std::invalid_argument / std::domain_error derivatives instead.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape mismatch between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the documented domain (bad order, non-monic input, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Model construction failed structurally (singular constant term, ...).
struct DegenerateModelError : NumericError {
    using NumericError::NumericError;
};

/// An infinite-series operation was requested on a non-decaying sequence.
struct DivergenceError : NumericError {
    using NumericError::NumericError;
};

/// A sequence is too short for the requested truncation.
struct TruncationError : NumericError {
    using NumericError::NumericError;
};

/// Circle quadrature failed to converge within the node budget.
struct QuadratureError : NumericError {
    QuadratureError(const std::string& what, double delta)
        : NumericError(what), last_delta(delta) {}
    double last_delta;
};

/// Pointwise evaluation hit a pole (or a numerically singular matrix).
struct EvaluationError : NumericError {
    using NumericError::NumericError;
};

/// The system is not representable in the requested chart.
struct ChartError : NumericError {
    using NumericError::NumericError;
};

}  // namespace sysgeom
