#include <algorithm>
#include <functional>

#include "regreg/errors.hpp"
#include "regreg/grammar.hpp"

namespace regreg {

namespace {

struct LeftCall {
  std::size_t rule;
  bool via_lookahead;
  friend bool operator==(const LeftCall&, const LeftCall&) = default;
  friend auto operator<=>(const LeftCall&, const LeftCall&) = default;
};

class LeftEdges {
 public:
  LeftEdges(const Grammar& g, Nullability& nullable) : g_(g), nullable_(nullable) {}

  const std::vector<LeftCall>& of(ExprId e) {
    if (auto it = cache_.find(e); it != cache_.end()) return it->second;
    std::vector<LeftCall> out;
    const ExprPool& p = g_.pool();
    const ExprNode& n = p.node(e);
    auto add = [&](ExprId k, bool lookahead) {
      for (LeftCall c : of(k)) out.push_back({c.rule, c.via_lookahead || lookahead});
    };
    switch (n.kind) {
      case Kind::Seq:
        add(n.kids[0], false);
        if (nullable_(n.kids[0])) add(n.kids[1], false);
        break;
      case Kind::Switch:
        if (n.kids[1] == p.success()) {
          add(n.kids[0], false);
        } else {
          add(n.kids[0], true);
          add(n.kids[1], false);
        }
        add(n.kids[2], false);
        break;
      case Kind::Many:
      case Kind::Bind: add(n.kids[0], false); break;
      case Kind::Enter: add(n.kids[0], false); break;
      case Kind::Nested:
        add(n.kids[0], false);
        if (nullable_(n.kids[0])) {
          add(n.kids[1], false);
          if (nullable_(n.kids[1])) add(n.kids[2], false);
        }
        break;
      case Kind::RuleRef:
        if (auto r = g_.find_rule(n.payload)) out.push_back({*r, false});
        break;
      default: break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return cache_.emplace(e, std::move(out)).first->second;
  }

  bool calls(ExprId e, std::size_t rule) {
    for (LeftCall c : of(e)) {
      if (c.rule == rule) return true;
    }
    return false;
  }

 private:
  const Grammar& g_;
  Nullability& nullable_;
  std::unordered_map<ExprId, std::vector<LeftCall>, ExprIdHash> cache_;
};

// Tarjan over the rule-level left-call graph.
std::vector<std::vector<std::size_t>> left_sccs(const Grammar& g, LeftEdges& edges) {
  const std::size_t n = g.rule_count();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (LeftCall c : edges.of(g.rules()[v].body)) {
      if (index[c.rule] < 0) {
        visit(c.rule);
        low[v] = std::min(low[v], low[c.rule]);
      } else if (on_stack[c.rule]) {
        low[v] = std::min(low[v], index[c.rule]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  return out;
}

bool is_cyclic(const Grammar& g, LeftEdges& edges, const std::vector<std::size_t>& comp) {
  if (comp.size() > 1) return true;
  return edges.calls(g.rules()[comp[0]].body, comp[0]);
}

bool has_own_semantics(const ExprPool& p, ExprId e) {
  const ExprNode& n = p.node(e);
  if (n.kind == Kind::Act || n.kind == Kind::Bind) return true;
  if (n.kind == Kind::RuleRef) return false;
  for (int i = 0; i < n.arity(); ++i) {
    if (has_own_semantics(p, n.kids[i])) return true;
  }
  return false;
}

class Rewriter {
 public:
  Rewriter(Grammar& g, std::size_t budget) : g_(g), p_(g.pool()), nullable_(g), edges_(g, nullable_), budget_(budget) {}

  void run() {
    for (const auto& comp : left_sccs(g_, edges_)) {
      if (!is_cyclic(g_, edges_, comp)) continue;
      for (std::size_t r : comp) {
        for (LeftCall c : edges_.of(g_.rules()[r].body)) {
          if (c.via_lookahead && std::binary_search(comp.begin(), comp.end(), c.rule)) {
            throw Error(ErrorCode::LeftRecursionInLookahead,
                        "lookahead in rule '" + name(r) + "' reaches left-recursive rule '" + name(c.rule) + "'");
          }
        }
      }
      for (std::size_t i = 0; i < comp.size(); ++i) {
        std::size_t ri = comp[i];
        for (bool again = true; again;) {
          again = false;
          for (std::size_t j = 0; j < i; ++j) {
            std::size_t rj = comp[j];
            if (!edges_.calls(body(ri), rj)) continue;
            if (++substitutions_ > budget_) {
              throw Error(ErrorCode::IrreducibleRecursion,
                          "left-recursion inlining budget of " + std::to_string(budget_) + " exceeded");
            }
            set_body(ri, inline_left(body(ri), rj, body(rj)));
            again = true;
          }
        }
        if (edges_.calls(body(ri), ri)) set_body(ri, rewrite_direct(ri));
      }
    }
    for (const auto& comp : left_sccs(g_, edges_)) {
      if (is_cyclic(g_, edges_, comp)) {
        throw Error(ErrorCode::IrreducibleRecursion, "left recursion through rule '" + name(comp[0]) + "' remains");
      }
    }
  }

 private:
  const std::string& name(std::size_t r) const { return p_.name(g_.rules()[r].name); }
  ExprId body(std::size_t r) const { return g_.rules()[r].body; }
  void set_body(std::size_t r, ExprId b) { g_.replace_body(g_.rules()[r].name, b); }

  [[noreturn]] void irreducible(std::size_t r, const char* why) {
    throw Error(ErrorCode::IrreducibleRecursion, "rule '" + name(r) + "': " + why);
  }

  ExprId inline_left(ExprId e, std::size_t target, ExprId replacement) {
    if (!edges_.calls(e, target)) return e;
    const ExprNode n = p_.node(e);
    switch (n.kind) {
      case Kind::RuleRef: return replacement;
      case Kind::Seq: {
        ExprId a = inline_left(n.kids[0], target, replacement);
        ExprId b = nullable_(n.kids[0]) ? inline_left(n.kids[1], target, replacement) : n.kids[1];
        return p_.mk_seq(a, b);
      }
      case Kind::Switch:
        if (n.kids[1] == p_.success()) {
          return p_.mk_switch(inline_left(n.kids[0], target, replacement), n.kids[1],
                              inline_left(n.kids[2], target, replacement));
        }
        return p_.mk_switch(n.kids[0], inline_left(n.kids[1], target, replacement),
                            inline_left(n.kids[2], target, replacement));
      case Kind::Many: return p_.mk_many_raw(inline_left(n.kids[0], target, replacement), n.eager);
      case Kind::Bind: return p_.mk_bind(n.payload, inline_left(n.kids[0], target, replacement));
      case Kind::Enter: return p_.mk_enter(inline_left(n.kids[0], target, replacement), n.kids[1]);
      default: irreducible(target, "left recursion passes through nested");
    }
  }

  // Splits e into alternatives, each either starting with a call of rule r
  // (optionally bound) or not left-calling r at all.
  void expose(ExprId e, std::size_t r, std::vector<ExprId>& out) {
    if (!edges_.calls(e, r)) {
      out.push_back(e);
      return;
    }
    const ExprNode n = p_.node(e);  // copy: the pool may grow below
    switch (n.kind) {
      case Kind::RuleRef: out.push_back(e); return;
      case Kind::Bind:
        if (p_.kind(n.kids[0]) == Kind::RuleRef) {
          out.push_back(e);
          return;
        }
        irreducible(r, "binding wraps a left-recursive sequence");
      case Kind::Switch:
        if (n.kids[1] != p_.success()) irreducible(r, "left recursion inside a committed choice");
        expose(n.kids[0], r, out);
        expose(n.kids[2], r, out);
        return;
      case Kind::Seq: {
        ExprId a = n.kids[0], b = n.kids[1];
        if (nullable_(a) && edges_.calls(b, r)) irreducible(r, "nullable prefix before left recursion");
        std::vector<ExprId> parts;
        expose(a, r, parts);
        for (ExprId x : parts) out.push_back(p_.mk_seq(x, b));
        return;
      }
      default: irreducible(r, "left recursion under iteration, nested or enter");
    }
  }

  ExprId rewrite_direct(std::size_t r) {
    std::vector<ExprId> alts;
    expose(body(r), r, alts);
    struct Step {
      std::optional<Symbol> var;
      ExprId rest;
    };
    std::vector<ExprId> bases;
    std::vector<Step> steps;
    bool semantic = false;
    for (ExprId a : alts) {
      if (!edges_.calls(a, r)) {
        bases.push_back(a);
        semantic |= has_own_semantics(p_, a);
        continue;
      }
      const ExprNode& n = p_.node(a);
      ExprId head = n.kind == Kind::Seq ? n.kids[0] : a;
      ExprId rest = n.kind == Kind::Seq ? n.kids[1] : p_.empty();
      Step s{std::nullopt, rest};
      if (p_.kind(head) == Kind::Bind) {
        s.var = p_.node(head).payload;
        semantic = true;
      }
      if (nullable_(rest)) irreducible(r, "left-recursive alternative can repeat without consuming input");
      semantic |= has_own_semantics(p_, rest);
      steps.push_back(s);
    }
    ExprId base = p_.mk_choice(bases);
    if (!semantic) {
      std::vector<ExprId> rests;
      for (const auto& s : steps) rests.push_back(s.rest);
      return p_.mk_seq(base, p_.mk_many(p_.mk_choice(rests)));
    }
    Symbol acc = p_.intern(p_.fresh_name("acc"));
    ExprId load = p_.mk_act(std::string(kLoadPrefix) + p_.name(acc));
    std::vector<ExprId> folded;
    for (const auto& s : steps) {
      folded.push_back(p_.mk_seq({s.var ? p_.mk_bind(*s.var, load) : p_.empty(), s.rest, p_.mk_bind(acc, p_.empty())}));
    }
    return p_.mk_seq({base, p_.mk_bind(acc, p_.empty()), p_.mk_many(p_.mk_choice(folded)), load});
  }

  Grammar& g_;
  ExprPool& p_;
  Nullability nullable_;
  LeftEdges edges_;
  std::size_t budget_;
  std::size_t substitutions_ = 0;
};

}  // namespace

Grammar eliminate_left_recursion(const Grammar& g, std::size_t inline_budget) {
  Grammar out(g.pool_ptr(), g.actions_ptr());
  for (const auto& r : g.rules()) out.add_rule(g.pool().name(r.name), r.body);
  out.set_start(g.start_name());
  Rewriter(out, inline_budget).run();
  return out;
}

}  // namespace regreg
