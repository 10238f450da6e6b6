#include "regreg/grammar.hpp"

#include <functional>
#include <unordered_set>

#include "regreg/errors.hpp"

namespace regreg {

Grammar::Grammar(std::shared_ptr<ExprPool> pool, std::shared_ptr<const ActionRegistry> actions)
    : pool_(std::move(pool)), actions_(std::move(actions)) {}

void Grammar::add_rule(std::string_view name, ExprId body) {
  Symbol s = pool_->intern(name);
  if (index_.count(s)) throw Error(ErrorCode::DuplicateRule, "rule '" + std::string(name) + "' defined twice");
  index_.emplace(s, rules_.size());
  rules_.push_back({s, body});
  if (!has_start_) {
    start_ = s;
    has_start_ = true;
  }
  finalized_ = false;
}

void Grammar::replace_body(Symbol name, ExprId body) {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::UnknownRule, "no rule '" + pool_->name(name) + "'");
  rules_[it->second].body = body;
  finalized_ = false;
}

void Grammar::set_start(std::string_view name) {
  start_ = pool_->intern(name);
  has_start_ = true;
}

std::optional<std::size_t> Grammar::find_rule(Symbol name) const {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::size_t> Grammar::find_rule(std::string_view name) const {
  auto s = pool_->lookup(name);
  return s ? find_rule(*s) : std::nullopt;
}

ExprId Grammar::body(Symbol name) const {
  auto i = find_rule(name);
  if (!i) throw Error(ErrorCode::UnknownRule, "no rule '" + pool_->name(name) + "'");
  return rules_[*i].body;
}

void Grammar::check_references() const {
  if (!rules_.empty() && !index_.count(start_)) {
    throw Error(ErrorCode::UnknownRule, "start rule '" + pool_->name(start_) + "' is not defined");
  }
  std::unordered_set<ExprId, ExprIdHash> seen;
  std::function<void(ExprId, Symbol)> walk = [&](ExprId e, Symbol owner) {
    if (!seen.insert(e).second) return;
    const ExprNode& n = pool_->node(e);
    if (n.kind == Kind::RuleRef && !index_.count(n.payload)) {
      throw Error(ErrorCode::UnknownRule,
                  "rule '" + pool_->name(owner) + "' refers to undefined '" + pool_->name(n.payload) + "'");
    }
    if (n.kind == Kind::Act && !actions_->contains(pool_->name(n.payload))) {
      throw Error(ErrorCode::UnknownActionHandle, "no action registered as '" + pool_->name(n.payload) + "'");
    }
    for (int i = 0; i < n.arity(); ++i) walk(n.kids[i], owner);
  };
  for (const auto& r : rules_) walk(r.body, r.name);
}

void Grammar::finalize(std::size_t inline_budget) {
  if (finalized_) return;
  check_references();
  Grammar rewritten = eliminate_left_recursion(*this, inline_budget);
  rules_ = rewritten.rules_;
  compute_info();
  finalized_ = true;
}

void Grammar::compute_info() {
  const std::size_t n = rules_.size();
  info_.assign(n, {});
  std::vector<std::vector<std::size_t>> calls(n);

  for (std::size_t r = 0; r < n; ++r) {
    RuleInfo& inf = info_[r];
    std::unordered_set<ExprId, ExprIdHash> seen;
    std::function<void(ExprId)> walk = [&](ExprId e) {
      if (!seen.insert(e).second) return;
      const ExprNode& node = pool_->node(e);
      switch (node.kind) {
        case Kind::RuleRef: calls[r].push_back(*find_rule(node.payload)); return;
        case Kind::Act: {
          inf.has_actions = true;
          auto spec = actions_->resolve(pool_->name(node.payload));
          if (spec) {
            inf.has_predicate |= spec->kind == ActionKind::Predicate;
            inf.uses_ctx_args |= spec->uses_ctx_args;
            inf.uses_ctx_returns |= spec->uses_ctx_returns;
          }
          return;
        }
        case Kind::Enter: inf.has_enter = true; break;
        default: break;
      }
      for (int i = 0; i < node.arity(); ++i) walk(node.kids[i]);
    };
    walk(rules_[r].body);
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t r = 0; r < n; ++r) {
      RuleInfo& a = info_[r];
      for (std::size_t c : calls[r]) {
        const RuleInfo& b = info_[c];
        RuleInfo before = a;
        a.has_predicate |= b.has_predicate;
        a.has_enter |= b.has_enter;
        a.uses_ctx_args |= b.uses_ctx_args;
        a.uses_ctx_returns |= b.uses_ctx_returns;
        changed |= before.has_predicate != a.has_predicate || before.has_enter != a.has_enter ||
                   before.uses_ctx_args != a.uses_ctx_args || before.uses_ctx_returns != a.uses_ctx_returns;
      }
    }
  }
  uses_ctx_args_ = uses_ctx_returns_ = false;
  for (const auto& inf : info_) {
    uses_ctx_args_ |= inf.uses_ctx_args;
    uses_ctx_returns_ |= inf.uses_ctx_returns;
  }
}

Nullability::Nullability(const Grammar& g) : g_(g), rule_nullable_(g.rule_count(), 0) {
  for (bool changed = true; changed;) {
    changed = false;
    cache_.clear();
    for (std::size_t r = 0; r < g.rule_count(); ++r) {
      bool v = eval(g.rules()[r].body);
      if (v && !rule_nullable_[r]) {
        rule_nullable_[r] = 1;
        changed = true;
      }
    }
  }
  cache_.clear();
}

bool Nullability::operator()(ExprId e) { return eval(e); }

bool Nullability::eval(ExprId e) {
  if (auto it = cache_.find(e); it != cache_.end()) return it->second;
  const ExprPool& p = g_.pool();
  const ExprNode& n = p.node(e);
  bool v = false;
  switch (n.kind) {
    case Kind::CharSet:
    case Kind::AnyItem:
    case Kind::Fail: v = false; break;
    case Kind::Success:
    case Kind::Empty:
    case Kind::Stop:
    case Kind::Many:
    case Kind::Act: v = true; break;
    case Kind::Seq: v = eval(n.kids[0]) && eval(n.kids[1]); break;
    case Kind::Switch:
      v = (n.kids[1] == p.success() ? eval(n.kids[0]) : eval(n.kids[1])) || eval(n.kids[2]);
      break;
    case Kind::Nested: v = eval(n.kids[0]) && eval(n.kids[1]) && eval(n.kids[2]); break;
    case Kind::Bind: v = eval(n.kids[0]); break;
    case Kind::Enter: v = eval(n.kids[0]); break;
    case Kind::RuleRef: {
      auto r = g_.find_rule(n.payload);
      v = r && rule_nullable_[*r];
      break;
    }
  }
  cache_.emplace(e, v);
  return v;
}

}  // namespace regreg
