#pragma once

#include <stdexcept>
#include <string>

namespace modcrit {

/// Failure categories shared by every module. The CLI maps each category to an exit code.
enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NotPositiveDefinite,
  TruncationFailure,
  DegenerateValue,
  SingularDenominator,
  ReductionStalled,
  NotInGroup,
  ParityViolation,
  SqrtFailure,
  NotAStabilizer,
  NotUnitary,
  NoConvergence,
  EscapedDomain,
  DegenerateHessian,
  InclusionFailure,
  ConventionUnvalidated,
  NoD3Structure,
};

const char* to_string(ErrorKind kind) noexcept;

/// True for failures of a numerical procedure (as opposed to a bad input or violated precondition).
bool is_numerical_failure(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace modcrit
