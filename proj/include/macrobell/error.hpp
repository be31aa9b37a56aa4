#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace macrobell {

enum class ErrorCode {
  NegativeEntry,
  RowNotNormalized,
  SignalingDetected,
  BadFamily,
  WeightsNotNormalized,
  NegativeWeight,
  BadParams,
  NotNoSignaling,
  LpNumericalFailure,
  OddM,
  TraceTooShort,
  OutOfRange,
  MismatchDetected,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RowNotNormalized: return "RowNotNormalized";
    case ErrorCode::SignalingDetected: return "SignalingDetected";
    case ErrorCode::BadFamily: return "BadFamily";
    case ErrorCode::WeightsNotNormalized: return "WeightsNotNormalized";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NotNoSignaling: return "NotNoSignaling";
    case ErrorCode::LpNumericalFailure: return "LpNumericalFailure";
    case ErrorCode::OddM: return "OddM";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MismatchDetected: return "MismatchDetected";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace macrobell
