#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bib {

enum class ErrorCode {
  InvalidArgument,
  SingularDerivative,
  DegenerateGrid,
  EmptyMask,
  ShapeMismatch,
  EmptyInner,
  EmptyShell,
  OutOfWindow,
  ZeroEvidence,
  SupportMismatch,
  UnknownHypothesis,
  UnknownDatum,
  PreconditionViolated,
  InsufficientData,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every failure path named by an operation's
/// contract throws this with the matching code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace bib
