#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regreg/engine.hpp"
#include "regreg/expr.hpp"
#include "regreg/grammar.hpp"
#include "regreg/value.hpp"

namespace regreg {

struct OracleOptions {
  std::size_t depth_cap = 0;  // rule-invocation depth; 0 means |input| + 10 * #rules
  bool peg = false;           // committed ordered choice and possessive iteration
  std::size_t max_steps = 0;  // 0 means unbounded; otherwise BudgetExceeded
};

struct TraceEvent {
  std::string rule;
  std::size_t pos = 0;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct OracleOutcome {
  bool success = false;
  bool cap_hit = false;  // some branch was cut off by the depth cap
  std::size_t end = 0;
  Value value;
  CtxReturns ctx_returns;
  std::vector<TraceEvent> trace;  // rule entries on the accepted derivation
  std::size_t steps = 0;

  std::vector<std::string> log() const;
};

// Plain backtracking over the same operators as the engine: no memo tables,
// nested treated as an ordinary sequence. Accepts unfinalized grammars.
OracleOutcome oracle_parse(const Grammar& g, const std::vector<Item>& input, std::string_view start = {},
                           OracleOptions opts = {});
OracleOutcome oracle_parse(const Grammar& g, std::string_view utf8_input, std::string_view start = {},
                           OracleOptions opts = {});
OracleOutcome oracle_match(const Grammar& g, ExprId e, const std::vector<Item>& input, OracleOptions opts = {});

}  // namespace regreg
