#include "modcrit/error.hpp"

namespace modcrit {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::TruncationFailure: return "TruncationFailure";
    case ErrorKind::DegenerateValue: return "DegenerateValue";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::ReductionStalled: return "ReductionStalled";
    case ErrorKind::NotInGroup: return "NotInGroup";
    case ErrorKind::ParityViolation: return "ParityViolation";
    case ErrorKind::SqrtFailure: return "SqrtFailure";
    case ErrorKind::NotAStabilizer: return "NotAStabilizer";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EscapedDomain: return "EscapedDomain";
    case ErrorKind::DegenerateHessian: return "DegenerateHessian";
    case ErrorKind::InclusionFailure: return "InclusionFailure";
    case ErrorKind::ConventionUnvalidated: return "ConventionUnvalidated";
    case ErrorKind::NoD3Structure: return "NoD3Structure";
  }
  return "Unknown";
}

bool is_numerical_failure(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::TruncationFailure:
    case ErrorKind::DegenerateValue:
    case ErrorKind::ReductionStalled:
    case ErrorKind::SqrtFailure:
    case ErrorKind::NotUnitary:
    case ErrorKind::NoConvergence:
    case ErrorKind::EscapedDomain:
    case ErrorKind::DegenerateHessian:
    case ErrorKind::NoD3Structure:
    case ErrorKind::InclusionFailure:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace modcrit
