#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "regreg/actions.hpp"
#include "regreg/expr.hpp"

namespace regreg {

struct Rule {
  Symbol name;
  ExprId body;
};

struct RuleInfo {
  bool has_actions = false;    // value is the body's returned value, not a CST node
  bool has_predicate = false;  // transitively
  bool has_enter = false;      // transitively
  bool uses_ctx_args = false;
  bool uses_ctx_returns = false;
};

class Grammar {
 public:
  explicit Grammar(std::shared_ptr<ExprPool> pool = std::make_shared<ExprPool>(),
                   std::shared_ptr<const ActionRegistry> actions = ActionRegistry::standard());

  ExprPool& pool() { return *pool_; }
  const ExprPool& pool() const { return *pool_; }
  std::shared_ptr<ExprPool> pool_ptr() const { return pool_; }
  const ActionRegistry& actions() const { return *actions_; }
  std::shared_ptr<const ActionRegistry> actions_ptr() const { return actions_; }

  // Throws DuplicateRule. The first rule added becomes the default start.
  void add_rule(std::string_view name, ExprId body);
  void replace_body(Symbol name, ExprId body);
  void set_start(std::string_view name);

  Symbol start() const { return start_; }
  const std::string& start_name() const { return pool_->name(start_); }
  std::size_t rule_count() const { return rules_.size(); }
  const std::vector<Rule>& rules() const { return rules_; }
  std::optional<std::size_t> find_rule(Symbol name) const;
  std::optional<std::size_t> find_rule(std::string_view name) const;
  ExprId body(Symbol name) const;

  // Resolves references and action handles, removes left recursion and
  // computes per-rule facts. Afterwards the grammar must not change.
  void finalize(std::size_t inline_budget = 256);
  bool finalized() const { return finalized_; }
  const RuleInfo& info(std::size_t rule_index) const { return info_[rule_index]; }
  bool uses_ctx_args() const { return uses_ctx_args_; }
  bool uses_ctx_returns() const { return uses_ctx_returns_; }

  // Throws UnknownRule / UnknownActionHandle.
  void check_references() const;

 private:
  void compute_info();

  std::shared_ptr<ExprPool> pool_;
  std::shared_ptr<const ActionRegistry> actions_;
  std::vector<Rule> rules_;
  std::unordered_map<Symbol, std::size_t> index_;
  Symbol start_ = 0;
  bool has_start_ = false;
  bool finalized_ = false;
  std::vector<RuleInfo> info_;
  bool uses_ctx_args_ = false;
  bool uses_ctx_returns_ = false;
};

// Rewrites direct left recursion into iteration with a left-folding
// accumulator and removes indirect recursion by inlining. Rules that are not
// left-recursive keep their exact ExprId.
Grammar eliminate_left_recursion(const Grammar& g, std::size_t inline_budget = 256);

// Expressions that may succeed without consuming input, given the grammar's
// rules. Lookaheads count as nullable.
class Nullability {
 public:
  explicit Nullability(const Grammar& g);
  bool operator()(ExprId e);

 private:
  bool eval(ExprId e);
  const Grammar& g_;
  std::vector<char> rule_nullable_;
  std::unordered_map<ExprId, bool, ExprIdHash> cache_;
};

}  // namespace regreg
