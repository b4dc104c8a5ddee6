#pragma once

#include <stdexcept>
#include <string>

namespace chernoff {

enum class ErrorCode {
  NonPositiveFlux,
  InvalidGeometry,
  InvalidPsf,
  QuadratureNotConverged,
  OutOfDomain,
  DivergentIntegral,
  NumericallyDependent,
  TruncationTooLossy,
  DimensionMismatch,
  NotPSD,
  InapplicablePSF,
  NonPositiveExponent,
  ThresholdUnreachable,
  UnnormalizedDistribution,
  DegenerateRates,
  InvalidArgument,
  Io,
  Config,
};

const char* to_string(ErrorCode code);

// All library failures surface as this type; the code identifies the contract violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chernoff
