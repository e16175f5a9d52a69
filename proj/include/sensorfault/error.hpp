#pragma once

#include <stdexcept>
#include <string>

namespace sensorfault {

/// What went wrong, at the granularity callers branch on.
enum class ErrorCode {
  BadInputFile,        // malformed CSV/JSON row or document
  UnsupportedData,     // e.g. irregular sample spacing
  EmptyInput,
  DegenerateInput,     // too few samples for the operation
  BadParameter,
  InsufficientTraining,
  UnusableNeighbor,    // constant / rank-deficient regressor
  BadPairing,          // misaligned or length-mismatched series
  ModelDataMismatch,
  DegeneratePlan,      // injection plan yields no faults
  SeriesTooShort,      // no burst fits
  UndefinedMetric,     // empty denominator
};

/// Broad failure class; maps one-to-one onto CLI exit codes.
enum class ErrorCategory { Config = 2, Data = 3, Numeric = 4 };

inline ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParameter:
    case ErrorCode::DegeneratePlan:
      return ErrorCategory::Config;
    case ErrorCode::UnusableNeighbor:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Data;
  }
}

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace sensorfault
