#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace regreg {

enum class ErrorCode {
  SyntaxError,
  UnknownRule,
  DuplicateRule,
  UnknownActionHandle,
  LeftRecursionInLookahead,
  IrreducibleRecursion,
  IterationNoProgress,
  DepthPruned,
  EngineBug,
  BudgetExceeded,
  CalledOutsideFlow,
  NonMonotoneDetected,
  HeightBudgetExceeded,
  StackMismatch,
  IndexOutOfRange,
  ContextualArgsUnsupported,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Byte offsets are into the original UTF-8 text; line and col are 1-based.
struct SourceSpan {
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  Error(ErrorCode code, const std::string& message, SourceSpan span)
      : Error(code, message) {
    span_ = span;
    has_span_ = true;
  }

  ErrorCode code() const noexcept { return code_; }
  bool has_span() const noexcept { return has_span_; }
  const SourceSpan& span() const noexcept { return span_; }

 private:
  ErrorCode code_;
  SourceSpan span_{};
  bool has_span_ = false;
};

}  // namespace regreg
