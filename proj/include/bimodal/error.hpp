#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bimodal {

enum class ErrorCode {
  DimensionMismatch,
  ContinuityViolation,
  NonFiniteEntry,
  SingularChange,
  WrongDimension,
  GuardViolation,
  InconsistentGeometry,
  ZeroB1,
  NotApplicable,
  NotControllable,
  FeasibilitySearchFailed,
  IoFailure,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ContinuityViolation: return "ContinuityViolation";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::SingularChange: return "SingularChange";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::GuardViolation: return "GuardViolation";
    case ErrorCode::InconsistentGeometry: return "InconsistentGeometry";
    case ErrorCode::ZeroB1: return "ZeroB1";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NotControllable: return "NotControllable";
    case ErrorCode::FeasibilitySearchFailed: return "FeasibilitySearchFailed";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Domain error raised by every module. `context` names the operation that
/// failed and is carried verbatim into the CLI's JSON error report.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string context = {})
      : std::runtime_error(message), code_(code), context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

}  // namespace bimodal
