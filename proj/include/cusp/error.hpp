#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cusp {

enum class ErrorCode {
  NotSquarefree,
  TooSmall,
  CtxMismatch,
  DivisionByZero,
  InternalOverflow,
  NoUnitFound,
  NonPositiveImaginary,
  ZeroTranslation,
  InvalidLevel,
  UnboundedRegion,
  NonTermination,
  LevelOutOfRange,
  InternalError,
  VerificationFailed,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this type; `code()`
/// tells callers (and the CLI exit-status mapping) which contract broke.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cusp
