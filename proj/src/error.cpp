#include "swkb/error.hpp"

namespace swkb {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveGap: return "NonPositiveGap";
    case ErrorCode::NotIncreasing: return "NotIncreasing";
    case ErrorCode::NonPositiveW: return "NonPositiveW";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::GammaMismatch: return "GammaMismatch";
    case ErrorCode::NonPositiveEnergy: return "NonPositiveEnergy";
    case ErrorCode::ExponentMinusOne: return "ExponentMinusOne";
    case ErrorCode::RepresentationMismatch: return "RepresentationMismatch";
    case ErrorCode::DifferentiationUnstable: return "DifferentiationUnstable";
    case ErrorCode::ContractionFailure: return "ContractionFailure";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::TaylorOrderInsufficient: return "TaylorOrderInsufficient";
    case ErrorCode::IllConditionedBasis: return "IllConditionedBasis";
    case ErrorCode::ToleranceExceeded: return "ToleranceExceeded";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::BracketLost: return "BracketLost";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::AlignmentFailure: return "AlignmentFailure";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace swkb
