#include "regreg/analysis.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "regreg/dataflow.hpp"
#include "regreg/dsl.hpp"
#include "regreg/utf8.hpp"

namespace regreg {

namespace {

using Label = RegexApprox::Edge::Label;

std::vector<std::vector<std::size_t>> out_edges(const RegexApprox& r) {
  std::vector<std::vector<std::size_t>> adj(r.states);
  for (std::size_t i = 0; i < r.edges.size(); ++i) adj[r.edges[i].from].push_back(i);
  return adj;
}

void close_eps(const RegexApprox& r, const std::vector<std::vector<std::size_t>>& adj, std::vector<char>& in,
               std::vector<std::uint32_t>& set) {
  for (std::size_t k = 0; k < set.size(); ++k) {
    for (std::size_t ei : adj[set[k]]) {
      const auto& ed = r.edges[ei];
      if (ed.label == Label::Epsilon && !in[ed.to]) {
        in[ed.to] = 1;
        set.push_back(ed.to);
      }
    }
  }
}

bool label_matches(const RegexApprox::Edge& ed, const Item& it) {
  if (ed.label == Label::Any) return true;
  return ed.label == Label::Set && it.is_scalar() && ed.set.contains(it.as_scalar());
}

// States from which some accepting state is reachable.
std::vector<char> live_states(const RegexApprox& r) {
  std::vector<std::vector<std::uint32_t>> rev(r.states);
  for (const auto& ed : r.edges) {
    if (ed.label == Label::Set && ed.set.matches_nothing()) continue;
    rev[ed.to].push_back(ed.from);
  }
  std::vector<char> live(r.states, 0);
  std::vector<std::uint32_t> work;
  for (auto a : r.accepting) {
    if (!live[a]) {
      live[a] = 1;
      work.push_back(a);
    }
  }
  while (!work.empty()) {
    auto s = work.back();
    work.pop_back();
    for (auto p : rev[s]) {
      if (!live[p]) {
        live[p] = 1;
        work.push_back(p);
      }
    }
  }
  return live;
}

// Copies `src` into `dst`; returns the state offset.
std::uint32_t embed(RegexApprox& dst, const RegexApprox& src) {
  std::uint32_t off = dst.states;
  dst.states += src.states;
  for (auto ed : src.edges) {
    ed.from += off;
    ed.to += off;
    dst.edges.push_back(std::move(ed));
  }
  return off;
}

// Language of strings consistent with a positive lookahead on `r`: every
// prefix of a word of L(r), and every extension of one.
RegexApprox lookahead_closure(const RegexApprox& r) {
  RegexApprox out = r;
  auto live = live_states(r);
  std::uint32_t tail = out.add_state();
  out.add_any(tail, tail);
  for (auto a : r.accepting) out.add_eps(a, tail);
  out.accepting.clear();
  for (std::uint32_t s = 0; s < r.states; ++s) {
    if (live[s]) out.accepting.push_back(s);
  }
  out.accepting.push_back(tail);
  return out;
}

std::size_t sat_add(std::size_t a, std::size_t b) { return std::min(a + b, SizeBounds::kInfinite); }

std::string show(const ExprPool& p, ExprId e) {
  try {
    return print_expr(p, e);
  } catch (const Error&) {
    return dump_expr(p, e);
  }
}

}  // namespace

bool RegexApprox::accepts(const std::vector<Item>& input) const {
  if (states == 0) return false;
  auto adj = out_edges(*this);
  std::vector<char> in(states, 0);
  std::vector<std::uint32_t> cur{start};
  in[start] = 1;
  close_eps(*this, adj, in, cur);
  for (const Item& it : input) {
    std::vector<char> nin(states, 0);
    std::vector<std::uint32_t> next;
    for (auto s : cur) {
      for (std::size_t ei : adj[s]) {
        const auto& ed = edges[ei];
        if (ed.label != Label::Epsilon && label_matches(ed, it) && !nin[ed.to]) {
          nin[ed.to] = 1;
          next.push_back(ed.to);
        }
      }
    }
    close_eps(*this, adj, nin, next);
    cur = std::move(next);
    in = std::move(nin);
    if (cur.empty()) return false;
  }
  return std::any_of(accepting.begin(), accepting.end(), [&](std::uint32_t a) { return in[a] != 0; });
}

bool RegexApprox::accepts(std::string_view utf8) const { return accepts(items_from_utf8(utf8)); }

bool is_empty_lang(const RegexApprox& r) {
  if (r.states == 0) return true;
  auto live = live_states(r);
  if (!live[r.start]) return true;
  // Live start means an accepting state is reachable through usable edges.
  return false;
}

RegexApprox intersect(const RegexApprox& a, const RegexApprox& b) {
  RegexApprox out;
  if (a.states == 0 || b.states == 0) {
    out.start = out.add_state();
    return out;
  }
  auto aa = out_edges(a), ba = out_edges(b);
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  std::deque<std::pair<std::uint32_t, std::uint32_t>> work;
  auto id_of = [&](std::uint32_t i, std::uint32_t j) {
    std::uint64_t key = (std::uint64_t{i} << 32) | j;
    auto [it, fresh] = ids.emplace(key, out.states);
    if (fresh) {
      out.add_state();
      work.emplace_back(i, j);
    }
    return it->second;
  };
  out.start = id_of(a.start, b.start);
  std::unordered_set<std::uint32_t> acc_a(a.accepting.begin(), a.accepting.end());
  std::unordered_set<std::uint32_t> acc_b(b.accepting.begin(), b.accepting.end());
  while (!work.empty()) {
    auto [i, j] = work.front();
    work.pop_front();
    std::uint32_t me = ids.at((std::uint64_t{i} << 32) | j);
    if (acc_a.count(i) && acc_b.count(j)) out.accepting.push_back(me);
    for (std::size_t ei : aa[i]) {
      const auto& ea = a.edges[ei];
      if (ea.label == Label::Epsilon) out.add_eps(me, id_of(ea.to, j));
    }
    for (std::size_t ej : ba[j]) {
      const auto& eb = b.edges[ej];
      if (eb.label == Label::Epsilon) out.add_eps(me, id_of(i, eb.to));
    }
    for (std::size_t ei : aa[i]) {
      const auto& ea = a.edges[ei];
      if (ea.label == Label::Epsilon) continue;
      for (std::size_t ej : ba[j]) {
        const auto& eb = b.edges[ej];
        if (eb.label == Label::Epsilon) continue;
        if (ea.label == Label::Any && eb.label == Label::Any) {
          out.add_any(me, id_of(ea.to, eb.to));
          continue;
        }
        CharClassSet s = ea.label == Label::Any ? eb.set : eb.label == Label::Any ? ea.set : ea.set.intersect(eb.set);
        if (s.positive().matches_nothing()) continue;
        out.add_set(me, id_of(ea.to, eb.to), std::move(s));
      }
    }
  }
  return out;
}

RegexApprox extend_right(const RegexApprox& r) {
  RegexApprox out = r;
  if (out.states == 0) {
    out.start = out.add_state();
    return out;
  }
  std::uint32_t tail = out.add_state();
  out.add_any(tail, tail);
  for (auto a : r.accepting) out.add_eps(a, tail);
  out.accepting.push_back(tail);
  return out;
}

struct Analyzer::Impl {
  explicit Impl(const Grammar& g)
      : g(g),
        p(g.pool()),
        first_solver(
            dataflow::Lattice<FirstInfo>{
                FirstInfo{},
                [](const FirstInfo& a, const FirstInfo& b) {
                  return FirstInfo{a.first.unite(b.first), a.nullable || b.nullable, a.any || b.any};
                },
                [](const FirstInfo& a, const FirstInfo& b) { return a == b; }},
            [this](const ExprId& e, FirstSolver& s) { return first_flow(e, s); }),
        size_solver(
            dataflow::Lattice<SizeBounds>{
                SizeBounds{SizeBounds::kInfinite, 0},
                [](const SizeBounds& a, const SizeBounds& b) {
                  return SizeBounds{std::min(a.min, b.min), std::max(a.max, b.max)};
                },
                [](const SizeBounds& a, const SizeBounds& b) { return a == b; }},
            [this](const ExprId& e, SizeSolver& s) { return size_flow(e, s); }) {}

  using FirstSolver = dataflow::Solver<ExprId, FirstInfo, ExprIdHash>;
  using SizeSolver = dataflow::Solver<ExprId, SizeBounds, ExprIdHash>;

  static constexpr std::uint32_t kStateBudget = 200000;

  const Grammar& g;
  const ExprPool& p;
  FirstSolver first_solver;
  SizeSolver size_solver;
  std::unordered_map<ExprId, FirstInfo, ExprIdHash> quick_cache;
  std::unordered_map<ExprId, RegexApprox, ExprIdHash> approx_cache;
  std::vector<std::size_t> expanding;

  std::optional<ExprId> rule_body(Symbol name) const {
    auto r = g.find_rule(name);
    if (!r) return std::nullopt;
    return g.rules()[*r].body;
  }

  FirstInfo first_flow(ExprId e, FirstSolver& s) {
    const ExprNode& n = p.node(e);
    switch (n.kind) {
      case Kind::CharSet: return FirstInfo{p.charset(e).positive(), false, false};
      case Kind::AnyItem: return FirstInfo{CharClassSet::all(), false, true};
      case Kind::Fail: return FirstInfo{};
      case Kind::Empty:
      case Kind::Success:
      case Kind::Stop:
      case Kind::Act: return FirstInfo{{}, true, false};
      case Kind::Seq: return seq_first({n.kids[0], n.kids[1]}, s);
      case Kind::Nested: return seq_first({n.kids[0], n.kids[1], n.kids[2]}, s);
      case Kind::Switch: {
        FirstInfo a = s.depends(n.kids[1] == p.success() ? n.kids[0] : n.kids[1]);
        FirstInfo b = s.depends(n.kids[2]);
        return FirstInfo{a.first.unite(b.first), a.nullable || b.nullable, a.any || b.any};
      }
      case Kind::Many: {
        FirstInfo b = s.depends(n.kids[0]);
        b.nullable = true;
        return b;
      }
      case Kind::Bind: return s.depends(n.kids[0]);
      case Kind::Enter: return s.depends(n.kids[0]);
      case Kind::RuleRef: {
        auto body = rule_body(n.payload);
        return body ? s.depends(*body) : FirstInfo{};
      }
    }
    return FirstInfo{};
  }

  FirstInfo seq_first(std::initializer_list<ExprId> parts, FirstSolver& s) {
    FirstInfo acc{{}, true, false};
    for (ExprId k : parts) {
      FirstInfo f = s.depends(k);
      acc.first = acc.first.unite(f.first);
      acc.any = acc.any || f.any;
      if (!f.nullable) {
        acc.nullable = false;
        return acc;
      }
    }
    return acc;
  }

  SizeBounds size_flow(ExprId e, SizeSolver& s) {
    const ExprNode& n = p.node(e);
    auto sum = [&](std::initializer_list<ExprId> parts) {
      SizeBounds acc{0, 0};
      for (ExprId k : parts) {
        SizeBounds b = s.depends(k);
        acc.min = sat_add(acc.min, b.min);
        acc.max = sat_add(acc.max, b.max);
      }
      return acc;
    };
    switch (n.kind) {
      case Kind::CharSet:
      case Kind::AnyItem: return {1, 1};
      case Kind::Fail: return {SizeBounds::kInfinite, 0};
      case Kind::Empty:
      case Kind::Success:
      case Kind::Stop:
      case Kind::Act: return {0, 0};
      case Kind::Seq: return sum({n.kids[0], n.kids[1]});
      case Kind::Nested: return sum({n.kids[0], n.kids[1], n.kids[2]});
      case Kind::Switch: {
        if (p.as_lookahead(e)) return {0, 0};
        SizeBounds a = s.depends(n.kids[1] == p.success() ? n.kids[0] : n.kids[1]);
        SizeBounds b = s.depends(n.kids[2]);
        return {std::min(a.min, b.min), std::max(a.max, b.max)};
      }
      case Kind::Many: {
        SizeBounds b = s.depends(n.kids[0]);
        return {0, b.max == 0 ? 0 : SizeBounds::kInfinite};
      }
      case Kind::Bind: return s.depends(n.kids[0]);
      case Kind::Enter: return s.depends(n.kids[0]);
      case Kind::RuleRef: {
        auto body = rule_body(n.payload);
        return body ? s.depends(*body) : SizeBounds{SizeBounds::kInfinite, 0};
      }
    }
    return {0, 0};
  }

  struct Frag {
    std::uint32_t in, out;
  };

  Frag sigma_star(RegexApprox& r) {
    Frag f{r.add_state(), r.add_state()};
    r.add_any(f.in, f.in);
    r.add_eps(f.in, f.out);
    return f;
  }

  Frag from_automaton(RegexApprox& r, const RegexApprox& sub) {
    std::uint32_t off = embed(r, sub);
    Frag f{sub.start + off, r.add_state()};
    for (auto a : sub.accepting) r.add_eps(a + off, f.out);
    return f;
  }

  RegexApprox standalone(ExprId e) {
    RegexApprox r;
    Frag f = build(r, e);
    r.start = f.in;
    r.accepting = {f.out};
    return r;
  }

  Frag build(RegexApprox& r, ExprId e) {
    const ExprNode n = p.node(e);
    auto concat = [&](std::initializer_list<ExprId> parts) {
      Frag acc{r.add_state(), 0};
      acc.out = acc.in;
      for (ExprId k : parts) {
        Frag f = build(r, k);
        r.add_eps(acc.out, f.in);
        acc.out = f.out;
      }
      return acc;
    };
    switch (n.kind) {
      case Kind::CharSet: {
        Frag f{r.add_state(), r.add_state()};
        r.add_set(f.in, f.out, p.charset(e).positive());
        return f;
      }
      case Kind::AnyItem: {
        Frag f{r.add_state(), r.add_state()};
        r.add_any(f.in, f.out);
        return f;
      }
      case Kind::Fail: return Frag{r.add_state(), r.add_state()};
      case Kind::Empty:
      case Kind::Success:
      case Kind::Stop:
      case Kind::Act: {
        Frag f{r.add_state(), r.add_state()};
        r.add_eps(f.in, f.out);
        return f;
      }
      case Kind::Seq: {
        auto la = p.as_lookahead(n.kids[0]);
        if (la && !la->negative) {
          RegexApprox guard = lookahead_closure(standalone(la->body));
          return from_automaton(r, intersect(guard, standalone(n.kids[1])));
        }
        return concat({n.kids[0], n.kids[1]});
      }
      case Kind::Switch: {
        if (p.as_lookahead(e)) return build(r, p.empty());
        Frag a = build(r, n.kids[1] == p.success() ? n.kids[0] : n.kids[1]);
        Frag b = build(r, n.kids[2]);
        Frag f{r.add_state(), r.add_state()};
        r.add_eps(f.in, a.in);
        r.add_eps(f.in, b.in);
        r.add_eps(a.out, f.out);
        r.add_eps(b.out, f.out);
        return f;
      }
      case Kind::Many: {
        Frag b = build(r, n.kids[0]);
        Frag f{r.add_state(), r.add_state()};
        r.add_eps(f.in, b.in);
        r.add_eps(b.out, f.in);
        r.add_eps(f.in, f.out);
        return f;
      }
      case Kind::Nested: {
        Frag a = build(r, n.kids[0]);
        Frag mid = sigma_star(r);
        Frag c = build(r, n.kids[2]);
        r.add_eps(a.out, mid.in);
        r.add_eps(mid.out, c.in);
        return Frag{a.in, c.out};
      }
      case Kind::Bind: return build(r, n.kids[0]);
      case Kind::Enter: return build(r, n.kids[0]);
      case Kind::RuleRef: {
        auto idx = g.find_rule(n.payload);
        if (!idx) return Frag{r.add_state(), r.add_state()};
        if (r.states > kStateBudget || std::find(expanding.begin(), expanding.end(), *idx) != expanding.end()) {
          return sigma_star(r);
        }
        expanding.push_back(*idx);
        Frag f = build(r, g.rules()[*idx].body);
        expanding.pop_back();
        return f;
      }
    }
    return Frag{r.add_state(), r.add_state()};
  }
};

Analyzer::Analyzer(const Grammar& g) : g_(g), impl_(std::make_unique<Impl>(g)) {}
Analyzer::~Analyzer() = default;

RegexApprox Analyzer::approx(ExprId e) {
  if (auto it = impl_->approx_cache.find(e); it != impl_->approx_cache.end()) return it->second;
  RegexApprox r = impl_->standalone(e);
  impl_->approx_cache.emplace(e, r);
  return r;
}

bool Analyzer::overlap(ExprId a, ExprId b) {
  return !is_empty_lang(intersect(extend_right(approx(a)), extend_right(approx(b))));
}

FirstInfo Analyzer::first_items(ExprId e) {
  RegexApprox r = approx(e);
  FirstInfo out;
  auto live = live_states(r);
  auto adj = out_edges(r);
  std::vector<char> in(r.states, 0);
  std::vector<std::uint32_t> closure{r.start};
  in[r.start] = 1;
  close_eps(r, adj, in, closure);
  for (auto a : r.accepting) out.nullable = out.nullable || in[a];
  for (auto s : closure) {
    for (std::size_t ei : adj[s]) {
      const auto& ed = r.edges[ei];
      if (ed.label == Label::Epsilon || !live[ed.to]) continue;
      if (ed.label == Label::Any) {
        out.any = true;
        out.first = CharClassSet::all();
      } else {
        out.first = out.first.unite(ed.set);
      }
    }
  }
  return out;
}

const FirstInfo& Analyzer::quick_first(ExprId e) {
  if (auto it = impl_->quick_cache.find(e); it != impl_->quick_cache.end()) return it->second;
  FirstInfo f = impl_->first_solver.solve(e);
  return impl_->quick_cache.emplace(e, std::move(f)).first->second;
}

SizeBounds Analyzer::size_bounds(ExprId e) { return impl_->size_solver.solve(e); }

std::vector<std::string> Analyzer::check_nested_progress() {
  const ExprPool& p = g_.pool();
  std::vector<std::string> out;
  std::unordered_set<ExprId, ExprIdHash> seen;
  std::string rule;
  std::function<void(ExprId)> visit = [&](ExprId e) {
    if (!seen.insert(e).second) return;
    if (auto c = p.as_commit(e)) {
      visit(c->prefix);
      visit(c->tail);
      visit(c->rest);
      return;
    }
    const ExprNode& n = p.node(e);
    if (n.kind == Kind::Nested) {
      std::size_t total = 0;
      for (int i = 0; i < 3; ++i) total = sat_add(total, size_bounds(n.kids[i]).min);
      if (total == 0) {
        out.push_back("rule '" + rule + "': " + show(p, e) + " may finish without consuming input");
      }
    }
    for (int i = 0; i < n.arity(); ++i) visit(n.kids[i]);
  };
  for (const auto& r : g_.rules()) {
    rule = p.name(r.name);
    seen.clear();
    visit(r.body);
  }
  return out;
}

AnalysisReport analyze(const Grammar& g) {
  const ExprPool& p = g.pool();
  Analyzer a(g);
  Nullability nullable(g);
  AnalysisReport rep;
  for (const auto& r : g.rules()) {
    RuleReport rr;
    rr.name = p.name(r.name);
    rr.bounds = a.size_bounds(r.body);
    rr.nullable = nullable(r.body);
    rr.empty_language = is_empty_lang(a.approx(r.body));
    FirstInfo f = a.first_items(r.body);
    rr.first = f.any ? "." : f.first.ranges().empty() ? "" : f.first.to_string();
    rep.rules.push_back(std::move(rr));
  }
  for (const auto& r : g.rules()) {
    std::unordered_set<ExprId, ExprIdHash> seen;
    std::function<void(ExprId, bool)> visit = [&](ExprId e, bool chain_member) {
      const ExprNode& n = p.node(e);
      if (p.is_choice(e) && !chain_member) {
        std::vector<ExprId> alts;
        ExprId cur = e;
        while (p.is_choice(cur)) {
          alts.push_back(p.node(cur).kids[0]);
          cur = p.node(cur).kids[2];
        }
        alts.push_back(cur);
        bool synthesized_loop = std::any_of(alts.begin(), alts.end(), [&](ExprId x) {
          return p.kind(x) == Kind::Stop && p.node(x).payload != kBreakStop;
        });
        if (!synthesized_loop && seen.insert(e).second) {
          ChoiceSite site;
          site.rule = p.name(r.name);
          site.disjoint = true;
          site.deterministic = true;
          std::vector<FirstInfo> firsts;
          for (ExprId x : alts) {
            site.alternatives.push_back(show(p, x));
            firsts.push_back(a.first_items(x));
            if (firsts.back().nullable) site.deterministic = false;
          }
          for (std::size_t i = 0; i < alts.size(); ++i) {
            for (std::size_t j = i + 1; j < alts.size(); ++j) {
              if (a.overlap(alts[i], alts[j])) site.disjoint = false;
              if (firsts[i].any || firsts[j].any || !firsts[i].first.disjoint(firsts[j].first)) {
                site.deterministic = false;
              }
            }
          }
          rep.choices.push_back(std::move(site));
        }
      }
      for (int i = 0; i < n.arity(); ++i) {
        bool member = n.kind == Kind::Switch && n.kids[1] == p.success() && i == 2;
        visit(n.kids[i], member);
      }
    };
    visit(r.body, false);
  }
  rep.warnings = a.check_nested_progress();
  return rep;
}

std::string format_report(const AnalysisReport& r) {
  std::string out;
  for (const auto& rr : r.rules) {
    out += "rule " + rr.name + ": min=" + (rr.bounds.min_infinite() ? "inf" : std::to_string(rr.bounds.min)) +
           " max=" + (rr.bounds.max_infinite() ? "inf" : std::to_string(rr.bounds.max)) +
           " nullable=" + (rr.nullable ? "yes" : "no") + " empty=" + (rr.empty_language ? "yes" : "no");
    if (!rr.first.empty()) out += " first=" + rr.first;
    out += "\n";
  }
  for (const auto& c : r.choices) {
    out += "choice in " + c.rule + ":";
    for (std::size_t i = 0; i < c.alternatives.size(); ++i) out += (i ? " | " : " ") + c.alternatives[i];
    if (c.deterministic) out += "  [deterministic]";
    else if (c.disjoint) out += "  [disjoint]";
    out += "\n";
  }
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
  return out;
}

}  // namespace regreg
