#include "regreg/errors.hpp"

namespace regreg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownRule: return "UnknownRule";
    case ErrorCode::DuplicateRule: return "DuplicateRule";
    case ErrorCode::UnknownActionHandle: return "UnknownActionHandle";
    case ErrorCode::LeftRecursionInLookahead: return "LeftRecursionInLookahead";
    case ErrorCode::IrreducibleRecursion: return "IrreducibleRecursion";
    case ErrorCode::IterationNoProgress: return "IterationNoProgress";
    case ErrorCode::DepthPruned: return "DepthPruned";
    case ErrorCode::EngineBug: return "EngineBug";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::CalledOutsideFlow: return "CalledOutsideFlow";
    case ErrorCode::NonMonotoneDetected: return "NonMonotoneDetected";
    case ErrorCode::HeightBudgetExceeded: return "HeightBudgetExceeded";
    case ErrorCode::StackMismatch: return "StackMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ContextualArgsUnsupported: return "ContextualArgsUnsupported";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace regreg
