#include "regreg/expr.hpp"

#include "regreg/errors.hpp"
#include "regreg/utf8.hpp"

namespace regreg {

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::CharSet: return "CharSet";
    case Kind::Seq: return "Seq";
    case Kind::Switch: return "Switch";
    case Kind::Many: return "Many";
    case Kind::Stop: return "Stop";
    case Kind::RuleRef: return "RuleRef";
    case Kind::Nested: return "Nested";
    case Kind::Act: return "Act";
    case Kind::Bind: return "Bind";
    case Kind::Enter: return "Enter";
    case Kind::Success: return "Success";
    case Kind::Fail: return "Fail";
    case Kind::Empty: return "Empty";
    case Kind::AnyItem: return "AnyItem";
  }
  return "?";
}

int ExprNode::arity() const {
  switch (kind) {
    case Kind::Seq:
    case Kind::Enter: return 2;
    case Kind::Switch:
    case Kind::Nested: return 3;
    case Kind::Many:
    case Kind::Bind: return 1;
    default: return 0;
  }
}

std::size_t ExprPool::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = static_cast<std::size_t>(k.kind) * 1000003u ^ k.payload * 2654435761u ^ k.eager;
  for (ExprId c : k.kids) h = h * 31 + c.v + 0x9e3779b9 + (h << 6) + (h >> 2);
  return h;
}

ExprPool::ExprPool() {
  nodes_.push_back(ExprNode{});  // id 0 stays invalid
  success_ = intern_node(Kind::Success, 0, {});
  fail_ = intern_node(Kind::Fail, 0, {});
  empty_ = intern_node(Kind::Empty, 0, {});
  any_ = intern_node(Kind::AnyItem, 0, {});
}

StopSet ExprPool::compute_stops(Kind kind, std::uint32_t payload,
                                const std::array<ExprId, 3>& kids) const {
  switch (kind) {
    case Kind::Stop: return stop_bit(payload);
    case Kind::Many:
    case Kind::RuleRef:
    case Kind::Nested: return 0;
    default: break;
  }
  StopSet s = 0;
  for (ExprId c : kids) {
    if (c) s |= nodes_[c.v].stops;
  }
  return s;
}

ExprId ExprPool::intern_node(Kind kind, std::uint32_t payload, std::array<ExprId, 3> kids, bool eager) {
  Key key{kind, eager, payload, kids};
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  ExprNode n;
  n.kind = kind;
  n.eager = eager;
  n.payload = payload;
  n.kids = kids;
  n.stops = compute_stops(kind, payload, kids);
  ExprId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(n);
  index_.emplace(key, id);
  return id;
}

ExprId ExprPool::mk_charset(const CharClassSet& spec) {
  CharClassSet canon = spec.negated() ? spec : CharClassSet::from_ranges(spec.ranges());
  if (canon.positive().ranges().empty()) return fail_;
  auto& bucket = charset_index_[canon.hash()];
  for (std::uint32_t idx : bucket) {
    if (charsets_[idx] == canon) return intern_node(Kind::CharSet, idx, {});
  }
  auto idx = static_cast<std::uint32_t>(charsets_.size());
  charsets_.push_back(std::move(canon));
  bucket.push_back(idx);
  return intern_node(Kind::CharSet, idx, {});
}

ExprId ExprPool::mk_seq(ExprId head, ExprId tail) {
  if (head == empty_) return tail;
  if (tail == empty_) return head;
  if (head == fail_) return fail_;
  const ExprNode& h = nodes_[head.v];
  if (h.kind == Kind::Seq) {
    ExprId a = h.kids[0], b = h.kids[1];
    return mk_seq(a, mk_seq(b, tail));
  }
  return intern_node(Kind::Seq, 0, {head, tail});
}

ExprId ExprPool::mk_seq(const std::vector<ExprId>& parts) {
  ExprId acc = empty_;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) acc = mk_seq(*it, acc);
  return acc;
}

ExprId ExprPool::mk_switch(ExprId head, ExprId on_success, ExprId on_fail) {
  if (head == fail_) return on_fail;
  if (head == success_) return on_success;
  return intern_node(Kind::Switch, 0, {head, on_success, on_fail});
}

ExprId ExprPool::mk_choice(const std::vector<ExprId>& alts) {
  std::vector<ExprId> kept;
  for (ExprId a : alts) {
    if (a == fail_) continue;
    if (!kept.empty() && kept.back() == a) continue;
    kept.push_back(a);
  }
  if (kept.empty()) return fail_;
  ExprId acc = kept.back();
  for (auto it = kept.rbegin() + 1; it != kept.rend(); ++it) {
    // Also collapse against the head of a nested choice in last position.
    if (*it == acc || (is_choice(acc) && nodes_[acc.v].kids[0] == *it)) continue;
    acc = mk_switch(*it, success_, acc);
  }
  return acc;
}

ExprId ExprPool::mk_not(ExprId e) { return mk_switch(mk_seq(e, success_), fail_, empty_); }

ExprId ExprPool::mk_and(ExprId e) { return mk_switch(mk_seq(e, success_), empty_, fail_); }

ExprId ExprPool::mk_many_raw(ExprId body, bool eager) {
  return intern_node(Kind::Many, 0, {body}, eager);
}

ExprId ExprPool::mk_many(ExprId body, bool eager) {
  auto key = std::make_pair(body, eager);
  if (auto it = many_memo_.find(key); it != many_memo_.end()) return it->second;
  ExprId out;
  if (nodes_[body.v].stops != 0) {
    out = mk_many_raw(body, eager);
  } else {
    ExprId stop = mk_stop(fresh_stop_id());
    out = mk_many_raw(eager ? mk_choice({stop, body}) : mk_choice({body, stop}), eager);
  }
  many_memo_.emplace(key, out);
  return out;
}

ExprId ExprPool::mk_stop(std::uint32_t id) { return intern_node(Kind::Stop, id, {}); }

ExprId ExprPool::mk_nested(ExprId start, ExprId mid, ExprId end) {
  return intern_node(Kind::Nested, 0, {start, mid, end});
}

ExprId ExprPool::mk_rule_ref(std::string_view name) { return mk_rule_ref(intern(name)); }
ExprId ExprPool::mk_rule_ref(Symbol name) { return intern_node(Kind::RuleRef, name, {}); }
ExprId ExprPool::mk_act(std::string_view handle) { return mk_act(intern(handle)); }
ExprId ExprPool::mk_act(Symbol handle) { return intern_node(Kind::Act, handle, {}); }
ExprId ExprPool::mk_bind(std::string_view name, ExprId e) { return mk_bind(intern(name), e); }
ExprId ExprPool::mk_bind(Symbol name, ExprId e) { return intern_node(Kind::Bind, name, {e}); }

ExprId ExprPool::mk_enter(ExprId outer, ExprId inner) {
  return intern_node(Kind::Enter, 0, {outer, inner});
}

ExprId ExprPool::literal(std::u32string_view text) {
  std::vector<ExprId> parts;
  parts.reserve(text.size());
  for (char32_t c : text) parts.push_back(mk_charset(CharClassSet::single(c)));
  return mk_seq(parts);
}

ExprId ExprPool::literal(std::string_view utf8_text) { return literal(utf8::decode(utf8_text)); }

ExprId ExprPool::commit(ExprId prefix, ExprId tail, ExprId rest) {
  ExprId stop_then_tail = mk_seq(mk_stop(kBreakStop), tail);
  if (prefix == empty_) return stop_then_tail;
  ExprId guard = mk_nested(empty_, prefix, empty_);
  return mk_switch(mk_seq(guard, success_), mk_seq(guard, stop_then_tail), rest);
}

Symbol ExprPool::intern(std::string_view name) {
  if (auto it = symbol_index_.find(std::string(name)); it != symbol_index_.end()) return it->second;
  auto s = static_cast<Symbol>(symbols_.size());
  symbols_.emplace_back(name);
  symbol_index_.emplace(std::string(name), s);
  return s;
}

std::optional<Symbol> ExprPool::lookup(std::string_view name) const {
  if (auto it = symbol_index_.find(std::string(name)); it != symbol_index_.end()) return it->second;
  return std::nullopt;
}

std::string ExprPool::fresh_name(std::string_view base) {
  for (;;) {
    std::string n = "$" + std::string(base) + std::to_string(next_fresh_++);
    if (!lookup(n)) return n;
  }
}

ExprId ExprPool::transform(ExprId e, const std::function<std::optional<ExprId>(ExprId)>& fn) {
  std::unordered_map<ExprId, ExprId, ExprIdHash> done;
  std::function<ExprId(ExprId)> go = [&](ExprId x) -> ExprId {
    if (auto it = done.find(x); it != done.end()) return it->second;
    ExprNode n = nodes_[x.v];
    std::array<ExprId, 3> k{};
    for (int i = 0; i < n.arity(); ++i) k[i] = go(n.kids[i]);
    ExprId rebuilt = x;
    if (k != n.kids) {
      switch (n.kind) {
        case Kind::Seq: rebuilt = mk_seq(k[0], k[1]); break;
        case Kind::Switch: rebuilt = mk_switch(k[0], k[1], k[2]); break;
        case Kind::Many:
          rebuilt = nodes_[k[0].v].stops != 0 ? mk_many_raw(k[0], n.eager) : mk_many(k[0], n.eager);
          break;
        case Kind::Nested: rebuilt = mk_nested(k[0], k[1], k[2]); break;
        case Kind::Bind: rebuilt = mk_bind(n.payload, k[0]); break;
        case Kind::Enter: rebuilt = mk_enter(k[0], k[1]); break;
        default: break;
      }
    }
    if (auto r = fn(rebuilt)) rebuilt = *r;
    done.emplace(x, rebuilt);
    return rebuilt;
  };
  return go(e);
}

std::optional<ExprPool::Lookahead> ExprPool::as_lookahead(ExprId e) const {
  const ExprNode& n = nodes_[e.v];
  if (n.kind != Kind::Switch) return std::nullopt;
  bool negative;
  if (n.kids[1] == fail_ && n.kids[2] == empty_) {
    negative = true;
  } else if (n.kids[1] == empty_ && n.kids[2] == fail_) {
    negative = false;
  } else {
    return std::nullopt;
  }
  // The head is body·success, right-nested. Rebuild the body from the back;
  // every suffix of it was interned when the body itself was built.
  std::vector<ExprId> heads;
  ExprId cur = n.kids[0];
  while (nodes_[cur.v].kind == Kind::Seq && nodes_[cur.v].kids[1] != success_) {
    heads.push_back(nodes_[cur.v].kids[0]);
    cur = nodes_[cur.v].kids[1];
  }
  if (nodes_[cur.v].kind != Kind::Seq) return std::nullopt;
  ExprId body = nodes_[cur.v].kids[0];
  for (auto it = heads.rbegin(); it != heads.rend(); ++it) {
    auto found = index_.find(Key{Kind::Seq, false, 0, {*it, body, ExprId{}}});
    if (found == index_.end()) return std::nullopt;
    body = found->second;
  }
  return Lookahead{negative, body};
}

std::optional<ExprPool::Commit> ExprPool::as_commit(ExprId e) const {
  const ExprNode& n = nodes_[e.v];
  if (n.kind != Kind::Switch) return std::nullopt;
  const ExprNode& h = nodes_[n.kids[0].v];
  if (h.kind != Kind::Seq || h.kids[1] != success_) return std::nullopt;
  ExprId guard = h.kids[0];
  const ExprNode& g = nodes_[guard.v];
  if (g.kind != Kind::Nested || g.kids[0] != empty_ || g.kids[2] != empty_) return std::nullopt;
  const ExprNode& s = nodes_[n.kids[1].v];
  if (s.kind != Kind::Seq || s.kids[0] != guard) return std::nullopt;
  const ExprNode& st = nodes_[s.kids[1].v];
  ExprId tail;
  if (st.kind == Kind::Stop && st.payload == kBreakStop) {
    tail = empty_;
  } else if (st.kind == Kind::Seq && nodes_[st.kids[0].v].kind == Kind::Stop &&
             nodes_[st.kids[0].v].payload == kBreakStop) {
    tail = st.kids[1];
  } else {
    return std::nullopt;
  }
  return Commit{g.kids[1], tail, n.kids[2]};
}

bool ExprPool::is_choice(ExprId e) const {
  const ExprNode& n = nodes_[e.v];
  return n.kind == Kind::Switch && n.kids[1] == success_;
}

namespace {

bool forgets_to_empty(const ExprPool& pool, ExprId e) {
  const ExprNode& n = pool.node(e);
  if (n.kind == Kind::Act || n.kind == Kind::Empty) return true;
  if (n.kind == Kind::Bind) return forgets_to_empty(pool, n.kids[0]);
  if (n.kind == Kind::Seq) return forgets_to_empty(pool, n.kids[0]) && forgets_to_empty(pool, n.kids[1]);
  return false;
}

void dump_rec(const ExprPool& pool, ExprId e, bool forget, std::string& out) {
  const ExprNode& n = pool.node(e);
  if (forget) {
    if (n.kind == Kind::Bind) return dump_rec(pool, n.kids[0], forget, out);
    if (forgets_to_empty(pool, e)) {
      out += "Empty";
      return;
    }
    if (n.kind == Kind::Seq) {
      std::vector<ExprId> parts;
      ExprId cur = e;
      while (pool.kind(cur) == Kind::Seq) {
        parts.push_back(pool.node(cur).kids[0]);
        cur = pool.node(cur).kids[1];
      }
      parts.push_back(cur);
      std::erase_if(parts, [&](ExprId p) { return forgets_to_empty(pool, p); });
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) out += "Seq[";
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " ";
        dump_rec(pool, parts[i], forget, out);
      }
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) out += "]";
      return;
    }
  }
  out += to_string(n.kind);
  switch (n.kind) {
    case Kind::CharSet: out += pool.charset(e).to_string(); return;
    case Kind::Stop: out += std::to_string(n.payload); return;
    case Kind::RuleRef:
    case Kind::Act: out += "(" + pool.name(n.payload) + ")"; return;
    case Kind::Bind: out += ":" + pool.name(n.payload); break;
    case Kind::Many:
      if (n.eager) out += "?";
      break;
    default: break;
  }
  if (n.arity() == 0) return;
  out += "[";
  for (int i = 0; i < n.arity(); ++i) {
    if (i) out += " ";
    dump_rec(pool, n.kids[i], forget, out);
  }
  out += "]";
}

}  // namespace

std::string dump_expr(const ExprPool& pool, ExprId e, bool forget) {
  std::string out;
  dump_rec(pool, e, forget, out);
  return out;
}

}  // namespace regreg
