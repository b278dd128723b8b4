#pragma once

#include <stdexcept>
#include <string>

namespace swkb {

enum class ErrorCode {
  NonPositiveGap,
  NotIncreasing,
  NonPositiveW,
  OutOfDomain,
  QuadratureFailure,
  GammaMismatch,
  NonPositiveEnergy,
  ExponentMinusOne,
  RepresentationMismatch,
  DifferentiationUnstable,
  ContractionFailure,
  GridTooCoarse,
  TaylorOrderInsufficient,
  IllConditionedBasis,
  ToleranceExceeded,
  RankDeficient,
  BracketLost,
  StepUnderflow,
  ToleranceNotMet,
  AlignmentFailure,
  ConfigParse,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace swkb
