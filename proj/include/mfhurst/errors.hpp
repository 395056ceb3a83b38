#pragma once

#include <stdexcept>
#include <string>

namespace mfhurst {

// Broad failure class, used by the CLI to pick an exit code:
// usage errors -> 1, data errors -> 2, numerical failures -> 3.
enum class ErrorCategory { Usage, Data, Numerical };

enum class ErrorCode {
  // ingest
  FileNotFound,
  ParseError,
  DuplicateDate,
  EmptySeries,
  NonPositivePrice,
  // transform
  SeriesTooShort,
  WrongKind,
  TooFewNonZero,
  // config validation
  ConfigInvalid,
  // mfdfa
  ScaleTooLarge,
  ScaleTooSmall,
  AllZeroVariances,
  InsufficientScales,
  DegenerateSeries,
  // spectrum
  GridTooSmall,
  QNotOnGrid,
  QZero,
  // rolling
  WindowTooLarge,
  PeriodTooShort,
  PeriodOutsideData,
  // hurst scaling
  InvalidA1,
  SingularFit,
  NonConvergence,
  // pipeline / io
  IoError,
};

inline ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateDate:
    case ErrorCode::EmptySeries:
    case ErrorCode::NonPositivePrice:
    case ErrorCode::SeriesTooShort:
    case ErrorCode::TooFewNonZero:
    case ErrorCode::PeriodTooShort:
    case ErrorCode::PeriodOutsideData:
    case ErrorCode::IoError:
      return ErrorCategory::Data;
    case ErrorCode::WrongKind:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::ScaleTooLarge:
    case ErrorCode::ScaleTooSmall:
    case ErrorCode::GridTooSmall:
    case ErrorCode::QNotOnGrid:
    case ErrorCode::QZero:
    case ErrorCode::WindowTooLarge:
    case ErrorCode::InvalidA1:
      return ErrorCategory::Usage;
    case ErrorCode::AllZeroVariances:
    case ErrorCode::InsufficientScales:
    case ErrorCode::DegenerateSeries:
    case ErrorCode::SingularFit:
    case ErrorCode::NonConvergence:
      return ErrorCategory::Numerical;
  }
  return ErrorCategory::Data;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mfhurst
