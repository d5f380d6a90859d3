#pragma once

#include <stdexcept>

namespace gfr {

/// Field-level precondition violation: non-finite values, mismatched grids,
/// malformed component counts.
class FieldError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The deformation stopped being a usable diffeomorphism: Jacobian
/// determinant at or below the configured floor, a degenerate push-forward
/// metric, or an inverse-consistency defect past its bound.
class NonDiffeomorphicError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Backtracking reached dt_min without a strict energy decrease. Signals
/// discrete stationarity or a resolution limit, not a programming error.
class LineSearchFailedError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace gfr
