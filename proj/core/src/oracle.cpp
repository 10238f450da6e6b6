#include "regreg/oracle.hpp"

#include <optional>
#include <unordered_map>

#include "regreg/actions.hpp"
#include "regreg/utf8.hpp"

namespace regreg {

std::vector<std::string> OracleOutcome::log() const {
  std::vector<std::string> out;
  for (const auto& [name, v] : ctx_returns) {
    if (name == "log") out.push_back(v.kind() == Value::Kind::Text ? v.text() : v.print());
  }
  return out;
}

namespace {

enum class CK : std::uint8_t { Done, Local, Then, Loop, RuleExit, BindK, EnterK, EnterExit, NestedExit };

struct Cont {
  CK kind;
  ExprId e;
  std::size_t payload;
  const Cont* parent;
};

struct Args {
  std::size_t s = 0;
  StopSet stops = 0;
  Value returned;
};

struct Res {
  bool ok = false;
  std::size_t end = 0;
  Value returned;
};

using CtxArgs = std::vector<std::pair<std::string, Value>>;

struct Scope {
  std::size_t rule = 0;
  bool nested = false;
  std::size_t start = 0;
  StopSet saved_stops = 0;
  bool has_actions = true;
  std::vector<std::pair<std::string, Value>> bindings;
  std::vector<Value> children;
  CtxArgs ctx_saved;
};

struct Many {
  std::vector<Value> acc;
  StopSet saved_stops = 0;
  std::size_t iter_start = 0;
  int empties = 0;
};

struct Input {
  std::vector<Item> items;
  std::size_t outer_pos = 0;
  StopSet outer_stops = 0;
};

enum class Op : std::uint8_t {
  PushScope,
  PopScope,
  AddChildren,
  Bind,
  PushMany,
  PopMany,
  AddAcc,
  Iter,
  SetCtx,
  Emit,
  PushInput,
  PopInput,
  Trace,
};

struct Undo {
  Undo(Op op, std::size_t a = 0, std::size_t b = 0, bool had = false, Value v = {})
      : op(op), a(a), b(b), had(had), v(std::move(v)) {}
  Op op;
  std::size_t a;
  std::size_t b;
  bool had;
  Value v;
};

class Oracle final : public ActionContext {
 public:
  Oracle(const Grammar& g, const std::vector<Item>& input, OracleOptions opts)
      : g_(g), pool_(g.pool()), main_(input), opts_(opts) {
    cap_ = opts.depth_cap ? opts.depth_cap : input.size() + 10 * g.rule_count();
    scopes_.reserve(64);
    trail_.reserve(256);
    has_actions_.assign(g.rule_count(), -1);
    scopes_.push_back(Scope{});
  }

  OracleOutcome run_rule(std::size_t ri) {
    Cont done{CK::Done, {}, 0, nullptr};
    Cont exit{CK::RuleExit, {}, ri, &done};
    enter_rule(ri, 0, 0);
    depth_ = 1;
    Args a;
    Res r = match(g_.rules()[ri].body, a, &exit);
    return outcome(r);
  }

  OracleOutcome run_expr(ExprId e) {
    Cont done{CK::Done, {}, 0, nullptr};
    Res r = match(e, Args{}, &done);
    return outcome(r);
  }

  // ActionContext
  const Value& returned() const override { return cur_->returned; }
  void set_returned(Value v) override { cur_->returned = std::move(v); }
  const Value* binding(std::string_view name) const override {
    for (const auto& [k, v] : scopes_.back().bindings) {
      if (k == name) return &v;
    }
    return nullptr;
  }
  void bind(std::string_view name, Value v) override { set_binding(std::string(name), std::move(v)); }
  const Value* ctx_arg(std::string_view name) const override {
    for (const auto& [k, v] : ctx_) {
      if (k == name) return &v;
    }
    return nullptr;
  }
  void set_ctx_arg(std::string_view name, Value v) override {
    CtxArgs next = ctx_;
    bool found = false;
    for (auto& [k, old] : next) {
      if (k == name) {
        old = v;
        found = true;
      }
    }
    if (!found) next.emplace_back(std::string(name), std::move(v));
    replace_ctx(std::move(next));
  }
  void emit(std::string_view name, Value v) override {
    returns_.emplace_back(std::string(name), std::move(v));
    trail_.emplace_back(Op::Emit);
  }
  std::size_t position() const override { return cur_->s; }
  Span rule_span() const override { return Span{scopes_.back().start, cur_->s}; }
  std::string matched_text() const override {
    std::string out;
    for (std::size_t i = scopes_.back().start; i < cur_->s; ++i) {
      const Item& it = items()[i];
      if (it.is_scalar()) {
        utf8::append(out, it.as_scalar());
      } else {
        out += print_item(it);
      }
    }
    return out;
  }

 private:
  const std::vector<Item>& items() const { return inputs_.empty() ? main_ : inputs_.back().items; }

  OracleOutcome outcome(const Res& r) {
    OracleOutcome out;
    out.success = r.ok;
    out.cap_hit = cap_hit_;
    out.steps = steps_;
    if (r.ok) {
      out.end = r.end;
      out.value = r.returned;
      out.ctx_returns = returns_;
      out.trace.reserve(trace_.size());
      for (const auto& [ri, pos] : trace_) out.trace.push_back({pool_.name(g_.rules()[ri].name), pos});
    }
    return out;
  }

  bool rule_has_actions(std::size_t ri) {
    if (has_actions_[ri] >= 0) return has_actions_[ri] != 0;
    std::vector<ExprId>& todo = todo_;
    todo.assign(1, g_.rules()[ri].body);
    bool found = false;
    while (!todo.empty() && !found) {
      const ExprNode& n = pool_.node(todo.back());
      todo.pop_back();
      if (n.kind == Kind::Act) found = true;
      if (n.kind == Kind::RuleRef) continue;
      for (int i = 0; i < n.arity(); ++i) todo.push_back(n.kids[i]);
    }
    has_actions_[ri] = found ? 1 : 0;
    return found;
  }

  std::size_t rule_index(Symbol name) const {
    auto r = g_.find_rule(name);
    if (!r) throw Error(ErrorCode::UnknownRule, "rule '" + pool_.name(name) + "' is not defined");
    return *r;
  }

  const ActionSpec& action(Symbol handle) {
    if (auto it = actions_.find(handle); it != actions_.end()) return it->second;
    auto spec = g_.actions().resolve(pool_.name(handle));
    if (!spec) throw Error(ErrorCode::UnknownActionHandle, "action '" + pool_.name(handle) + "' is not registered");
    return actions_.emplace(handle, std::move(*spec)).first->second;
  }

  void enter_rule(std::size_t ri, std::size_t s, StopSet stops) {
    Scope sc;
    sc.rule = ri;
    sc.start = s;
    sc.saved_stops = stops;
    sc.has_actions = rule_has_actions(ri);
    sc.ctx_saved = ctx_;
    scopes_.push_back(std::move(sc));
    trail_.emplace_back(Op::PushScope);
    trace_.emplace_back(ri, s);
    trail_.emplace_back(Op::Trace);
  }

  void set_binding(std::string name, Value v) {
    std::size_t si = scopes_.size() - 1;
    auto& b = scopes_[si].bindings;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i].first == name) {
        trail_.emplace_back(Op::Bind, si, i, true, std::move(b[i].second));
        b[i].second = std::move(v);
        return;
      }
    }
    b.emplace_back(std::move(name), std::move(v));
    trail_.emplace_back(Op::Bind, si, b.size() - 1, false);
  }

  void replace_ctx(CtxArgs next) {
    saved_ctx_.push_back(std::move(ctx_));
    ctx_ = std::move(next);
    trail_.emplace_back(Op::SetCtx);
  }

  Scope pop_scope() {
    Scope copy = scopes_.back();
    saved_scopes_.push_back(std::move(scopes_.back()));
    scopes_.pop_back();
    trail_.emplace_back(Op::PopScope);
    return copy;
  }

  void add_children(const std::vector<Value>& vs) {
    if (vs.empty()) return;
    auto& ch = scopes_.back().children;
    ch.insert(ch.end(), vs.begin(), vs.end());
    trail_.emplace_back(Op::AddChildren, scopes_.size() - 1, vs.size());
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      Undo u = std::move(trail_.back());
      trail_.pop_back();
      switch (u.op) {
        case Op::PushScope: scopes_.pop_back(); break;
        case Op::PopScope:
          scopes_.push_back(std::move(saved_scopes_.back()));
          saved_scopes_.pop_back();
          break;
        case Op::AddChildren: scopes_[u.a].children.resize(scopes_[u.a].children.size() - u.b); break;
        case Op::Bind:
          if (u.had) {
            scopes_[u.a].bindings[u.b].second = std::move(u.v);
          } else {
            scopes_[u.a].bindings.pop_back();
          }
          break;
        case Op::PushMany: manys_.pop_back(); break;
        case Op::PopMany:
          manys_.push_back(std::move(saved_manys_.back()));
          saved_manys_.pop_back();
          break;
        case Op::AddAcc: manys_.back().acc.pop_back(); break;
        case Op::Iter:
          manys_.back().iter_start = u.a;
          manys_.back().empties = static_cast<int>(u.b);
          break;
        case Op::SetCtx:
          ctx_ = std::move(saved_ctx_.back());
          saved_ctx_.pop_back();
          break;
        case Op::Emit: returns_.pop_back(); break;
        case Op::PushInput: inputs_.pop_back(); break;
        case Op::PopInput:
          inputs_.push_back(std::move(saved_inputs_.back()));
          saved_inputs_.pop_back();
          break;
        case Op::Trace: trace_.pop_back(); break;
      }
    }
  }

  static bool local_head(const ExprPool& pool, ExprId h) {
    const ExprNode& n = pool.node(h);
    return n.kind == Kind::Seq && n.kids[1] == pool.success();
  }

  Res match(ExprId e, Args a, const Cont* k) {
    if (++steps_ > opts_.max_steps && opts_.max_steps) {
      throw Error(ErrorCode::BudgetExceeded, "oracle exceeded " + std::to_string(opts_.max_steps) + " steps");
    }
    const ExprNode& n = pool_.node(e);
    const std::vector<Item>& in = items();
    switch (n.kind) {
      case Kind::CharSet:
        if (a.s < in.size() && in[a.s].is_scalar() && pool_.charset(e).contains(in[a.s].as_scalar())) {
          a.returned = Value::atom(in[a.s]);
          ++a.s;
          return call(k, std::move(a));
        }
        return {};
      case Kind::AnyItem:
        if (a.s < in.size()) {
          a.returned = Value::atom(in[a.s]);
          ++a.s;
          return call(k, std::move(a));
        }
        return {};
      case Kind::Empty: return call(k, std::move(a));
      case Kind::Success: return Res{true, a.s, a.returned};
      case Kind::Fail: return {};
      case Kind::Seq: {
        Cont c{CK::Then, n.kids[1], 0, k};
        return match(n.kids[0], std::move(a), &c);
      }
      case Kind::Stop:
        a.stops |= stop_bit(n.payload);
        return call(k, std::move(a));
      case Kind::Bind: {
        Cont c{CK::BindK, {}, n.payload, k};
        return match(n.kids[0], std::move(a), &c);
      }
      case Kind::Enter: {
        Cont c{CK::EnterK, n.kids[1], 0, k};
        return match(n.kids[0], std::move(a), &c);
      }
      case Kind::Many: {
        manys_.push_back(Many{{}, a.stops, a.s, 0});
        trail_.emplace_back(Op::PushMany);
        a.stops = 0;
        Cont c{CK::Loop, e, 0, k};
        return match(n.kids[0], std::move(a), &c);
      }
      case Kind::Act: {
        const ActionSpec& spec = action(n.payload);
        cur_ = &a;
        bool ok = spec.fn(*this);
        cur_ = nullptr;
        if (!ok) return {};
        return call(k, std::move(a));
      }
      case Kind::Switch: {
        const bool choice = n.kids[1] == pool_.success();
        std::size_t mark = trail_.size();
        Cont local{CK::Local, {}, 0, nullptr};
        if (choice && opts_.peg) {
          Args head = a;
          Res r = match(n.kids[0], head, &local);
          if (r.ok) return call(k, Args{r.end, local_stops_, r.returned});
          undo(mark);
          return match(n.kids[2], std::move(a), k);
        }
        const bool local_k = !choice && local_head(pool_, n.kids[0]);
        Res r = match(n.kids[0], a, local_k ? &local : k);
        if (r.ok && choice) return r;
        undo(mark);
        return match(r.ok ? n.kids[1] : n.kids[2], std::move(a), k);
      }
      case Kind::RuleRef: {
        std::size_t ri = rule_index(n.payload);
        if (depth_ >= cap_) {
          cap_hit_ = true;
          return {};
        }
        enter_rule(ri, a.s, a.stops);
        Cont c{CK::RuleExit, {}, ri, k};
        a.stops = 0;
        a.returned = Value{};
        ++depth_;
        Res r = match(g_.rules()[ri].body, std::move(a), &c);
        --depth_;
        return r;
      }
      case Kind::Nested: {
        Scope sc;
        sc.nested = true;
        sc.start = a.s;
        sc.saved_stops = a.stops;
        scopes_.push_back(std::move(sc));
        trail_.emplace_back(Op::PushScope);
        Cont exit{CK::NestedExit, {}, 0, k};
        Cont end{CK::Then, n.kids[2], 0, &exit};
        Cont mid{CK::Then, n.kids[1], 0, &end};
        a.stops = 0;
        a.returned = Value{};
        return match(n.kids[0], std::move(a), &mid);
      }
    }
    throw Error(ErrorCode::EngineBug, "unknown expression kind");
  }

  Res call(const Cont* k, Args a) {
    switch (k->kind) {
      case CK::Done:
        if (a.stops != 0) throw Error(ErrorCode::EngineBug, "stop reached outside any iteration");
        return Res{true, a.s, std::move(a.returned)};
      case CK::Local:
        local_stops_ = a.stops;
        return Res{true, a.s, std::move(a.returned)};
      case CK::Then: return match(k->e, std::move(a), k->parent);
      case CK::BindK:
        set_binding(pool_.name(static_cast<Symbol>(k->payload)), a.returned);
        return call(k->parent, std::move(a));
      case CK::Loop: {
        Many& m = manys_.back();
        if (a.stops != 0) {
          Value list = Value::list(m.acc);
          StopSet saved = m.saved_stops;
          saved_manys_.push_back(std::move(m));
          manys_.pop_back();
          trail_.emplace_back(Op::PopMany);
          a.stops = saved;
          a.returned = std::move(list);
          return call(k->parent, std::move(a));
        }
        trail_.emplace_back(Op::Iter, m.iter_start, static_cast<std::size_t>(m.empties));
        if (a.s == m.iter_start) {
          if (++m.empties >= 2) {
            throw Error(ErrorCode::IterationNoProgress,
                        "iteration matched empty twice at position " + std::to_string(a.s));
          }
        } else {
          m.iter_start = a.s;
          m.empties = 0;
        }
        m.acc.push_back(a.returned);
        trail_.emplace_back(Op::AddAcc);
        return match(pool_.node(k->e).kids[0], std::move(a), k);
      }
      case CK::RuleExit: {
        if (a.stops != 0) throw Error(ErrorCode::EngineBug, "stop reached outside any iteration");
        Scope sc = pop_scope();
        Value v = sc.has_actions ? a.returned
                                 : Value::node(pool_.name(g_.rules()[k->payload].name), std::move(sc.children),
                                               Span{sc.start, a.s});
        add_children({v});
        if (ctx_ != sc.ctx_saved) replace_ctx(sc.ctx_saved);
        a.stops = sc.saved_stops;
        a.returned = std::move(v);
        --depth_;
        Res r = call(k->parent, std::move(a));
        ++depth_;
        return r;
      }
      case CK::EnterK: {
        Input in;
        in.items = value_to_items(a.returned);
        in.outer_pos = a.s;
        in.outer_stops = a.stops;
        inputs_.push_back(std::move(in));
        trail_.emplace_back(Op::PushInput);
        Cont exit{CK::EnterExit, {}, 0, k->parent};
        return match(k->e, Args{0, 0, Value{}}, &exit);
      }
      case CK::EnterExit: {
        if (a.s != items().size()) return {};
        Input& in = inputs_.back();
        a.s = in.outer_pos;
        a.stops = in.outer_stops;
        saved_inputs_.push_back(std::move(in));
        inputs_.pop_back();
        trail_.emplace_back(Op::PopInput);
        return call(k->parent, std::move(a));
      }
      case CK::NestedExit: {
        if (a.stops != 0) throw Error(ErrorCode::EngineBug, "stop reached outside any iteration");
        Scope sc = pop_scope();
        add_children(sc.children);
        a.stops = sc.saved_stops;
        a.returned = a.returned.frozen();
        return call(k->parent, std::move(a));
      }
    }
    throw Error(ErrorCode::EngineBug, "unknown continuation kind");
  }

  const Grammar& g_;
  const ExprPool& pool_;
  const std::vector<Item>& main_;
  OracleOptions opts_;
  std::size_t cap_ = 0;
  std::size_t depth_ = 0;
  bool cap_hit_ = false;
  std::size_t steps_ = 0;
  StopSet local_stops_ = 0;

  std::vector<Scope> scopes_, saved_scopes_;
  std::vector<Many> manys_, saved_manys_;
  std::vector<Input> inputs_, saved_inputs_;
  CtxArgs ctx_;
  std::vector<CtxArgs> saved_ctx_;
  CtxReturns returns_;
  std::vector<std::pair<std::size_t, std::size_t>> trace_;  // (rule index, position)
  std::vector<Undo> trail_;
  Args* cur_ = nullptr;

  std::vector<signed char> has_actions_;  // -1 until computed
  std::vector<ExprId> todo_;
  std::unordered_map<Symbol, ActionSpec> actions_;
};

}  // namespace

OracleOutcome oracle_parse(const Grammar& g, const std::vector<Item>& input, std::string_view start,
                           OracleOptions opts) {
  std::optional<std::size_t> ri = start.empty() ? g.find_rule(g.start()) : g.find_rule(start);
  if (!ri) throw Error(ErrorCode::UnknownRule, "start rule '" + std::string(start) + "' is not defined");
  Oracle o(g, input, opts);
  return o.run_rule(*ri);
}

OracleOutcome oracle_parse(const Grammar& g, std::string_view utf8_input, std::string_view start,
                           OracleOptions opts) {
  return oracle_parse(g, items_from_utf8(utf8_input), start, opts);
}

OracleOutcome oracle_match(const Grammar& g, ExprId e, const std::vector<Item>& input, OracleOptions opts) {
  Oracle o(g, input, opts);
  return o.run_expr(e);
}

}  // namespace regreg
