#include "chernoff/errors.hpp"

namespace chernoff {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveFlux: return "NonPositiveFlux";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::InvalidPsf: return "InvalidPsf";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::NumericallyDependent: return "NumericallyDependent";
    case ErrorCode::TruncationTooLossy: return "TruncationTooLossy";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InapplicablePSF: return "InapplicablePSF";
    case ErrorCode::NonPositiveExponent: return "NonPositiveExponent";
    case ErrorCode::ThresholdUnreachable: return "ThresholdUnreachable";
    case ErrorCode::UnnormalizedDistribution: return "UnnormalizedDistribution";
    case ErrorCode::DegenerateRates: return "DegenerateRates";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace chernoff
