#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "regreg/value.hpp"

namespace regreg {

// What a semantic action may see and touch. Every write goes through the
// parser so it can be undone when the surrounding alternative fails.
class ActionContext {
 public:
  virtual ~ActionContext() = default;

  virtual const Value& returned() const = 0;
  virtual void set_returned(Value v) = 0;

  virtual const Value* binding(std::string_view name) const = 0;
  virtual void bind(std::string_view name, Value v) = 0;

  // Contextual arguments flow down the call tree and are restored on rule exit.
  virtual const Value* ctx_arg(std::string_view name) const = 0;
  virtual void set_ctx_arg(std::string_view name, Value v) = 0;
  // Contextual returns flow up; memo hits replay them.
  virtual void emit(std::string_view name, Value v) = 0;

  virtual std::size_t position() const = 0;
  virtual Span rule_span() const = 0;  // current rule start to current position
  virtual std::string matched_text() const = 0;
};

enum class ActionKind { Action, Predicate };

struct ActionSpec {
  std::string name;
  ActionKind kind = ActionKind::Action;
  // Returning false fails the match; only predicates may do so.
  std::function<bool(ActionContext&)> fn;
  bool uses_ctx_args = false;
  bool uses_ctx_returns = false;
};

class ActionRegistry {
 public:
  void add(ActionSpec spec);
  bool contains(std::string_view name) const { return resolve(name).has_value(); }

  // Besides registered names this resolves two families: `$load:NAME`
  // (returns binding NAME; used by the left-recursion rewrite) and `log_TAG`
  // (emits ("log", "TAG@pos") as a contextual return).
  std::optional<ActionSpec> resolve(std::string_view name) const;

  // add sub mul div int x id text bracket log_*
  static std::shared_ptr<const ActionRegistry> standard();

 private:
  std::map<std::string, ActionSpec, std::less<>> specs_;
};

inline constexpr std::string_view kLoadPrefix = "$load:";
inline constexpr std::string_view kLogPrefix = "log_";

}  // namespace regreg
