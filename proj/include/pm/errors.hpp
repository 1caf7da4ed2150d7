#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pm {

/// Base class for all library errors. `code()` is a stable machine-readable
/// identifier used by the CLI when emitting structured errors.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

/// Configuration / input errors (CLI exit code 1).
class InputError : public Error {
public:
  using Error::Error;
};

/// Numerical failures (CLI exit code 2).
class NumericalError : public Error {
public:
  using Error::Error;
};

struct DimensionMismatchError : InputError {
  explicit DimensionMismatchError(const std::string& msg) : InputError("DimensionMismatch", msg) {}
};

struct TooLargeError : InputError {
  explicit TooLargeError(const std::string& msg) : InputError("TooLarge", msg) {}
};

struct UnvisitedTargetError : InputError {
  explicit UnvisitedTargetError(const std::string& msg) : InputError("UnvisitedTarget", msg) {}
};

struct InvalidBracketError : InputError {
  explicit InvalidBracketError(const std::string& msg) : InputError("InvalidBracket", msg) {}
};

struct PeriodTooShortError : InputError {
  explicit PeriodTooShortError(const std::string& msg) : InputError("PeriodTooShort", msg) {}
};

struct ParseError : InputError {
  explicit ParseError(const std::string& msg) : InputError("ParseError", msg) {}
};

struct StepBlowupError : NumericalError {
  explicit StepBlowupError(const std::string& msg) : NumericalError("StepBlowup", msg) {}
};

struct NonConvergenceError : NumericalError {
  explicit NonConvergenceError(const std::string& msg) : NumericalError("NonConvergence", msg) {}
};

struct NoObservationError : InputError {
  explicit NoObservationError(const std::string& msg) : InputError("NoObservation", msg) {}
};

struct NonpositivePeakError : NumericalError {
  explicit NonpositivePeakError(const std::string& msg) : NumericalError("NonpositivePeak", msg) {}
};

struct InsufficientRunsError : InputError {
  explicit InsufficientRunsError(const std::string& msg) : InputError("InsufficientRuns", msg) {}
};

}  // namespace pm
