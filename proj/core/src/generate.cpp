#include "regreg/generate.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "regreg/dsl.hpp"
#include "regreg/errors.hpp"
#include "regreg/oracle.hpp"

namespace regreg::gen {

namespace {

using K = Node::K;

Node leaf(K k, std::string text = {}) { return Node{k, std::move(text), {}}; }
Node wrap(K k, Node kid) { return Node{k, {}, {std::move(kid)}}; }

bool atomic(const Node& n) {
  switch (n.k) {
    case K::Lit:
    case K::Class:
    case K::Any:
    case K::Empty:
    case K::Ref:
    case K::Log:
    case K::Nested: return true;
    case K::Seq:
    case K::Alt: return n.kids.size() == 1 && atomic(n.kids[0]);
    default: return false;
  }
}

void print(const Node& n, std::string& out);

void print_operand(const Node& n, std::string& out) {
  if (atomic(n)) {
    print(n, out);
  } else {
    out += '(';
    print(n, out);
    out += ')';
  }
}

void print(const Node& n, std::string& out) {
  switch (n.k) {
    case K::Lit: out += "'" + n.text + "'"; break;
    case K::Class: out += "<" + n.text + ">"; break;
    case K::Any: out += '.'; break;
    case K::Empty: out += "()"; break;
    case K::Ref: out += n.text; break;
    case K::Log: out += "{@log_" + n.text + "}"; break;
    case K::Nested:
      out += "nested('a', ";
      print(n.kids[0], out);
      out += ", 'c')";
      break;
    case K::Seq:
    case K::Alt:
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += n.k == K::Seq ? " " : " | ";
        if (n.kids.size() == 1) {
          print(n.kids[i], out);
        } else {
          print_operand(n.kids[i], out);
        }
      }
      break;
    case K::Star: print_operand(n.kids[0], out); out += '*'; break;
    case K::LazyStar: print_operand(n.kids[0], out); out += "*?"; break;
    case K::Plus: print_operand(n.kids[0], out); out += '+'; break;
    case K::Opt: print_operand(n.kids[0], out); out += '?'; break;
    case K::Not: out += '~'; print_operand(n.kids[0], out); break;
    case K::And: out += '&'; print_operand(n.kids[0], out); break;
  }
}

using NullMap = std::unordered_map<std::string, bool>;

bool nullable(const Node& n, const NullMap& rules) {
  switch (n.k) {
    case K::Lit:
    case K::Class:
    case K::Any:
    case K::Nested: return false;
    case K::Empty:
    case K::Log:
    case K::Star:
    case K::LazyStar:
    case K::Opt:
    case K::Not:
    case K::And: return true;
    case K::Plus: return nullable(n.kids[0], rules);
    case K::Ref: {
      auto it = rules.find(n.text);
      return it == rules.end() || it->second;
    }
    case K::Seq:
      return std::all_of(n.kids.begin(), n.kids.end(), [&](const Node& k) { return nullable(k, rules); });
    case K::Alt:
      return std::any_of(n.kids.begin(), n.kids.end(), [&](const Node& k) { return nullable(k, rules); });
  }
  return true;
}

NullMap rule_nullability(const GenGrammar& g) {
  NullMap m;
  for (const auto& r : g.rules) m[r.name] = false;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : g.rules) {
      bool v = !r.nested && nullable(r.body, m);
      if (v != m[r.name]) {
        m[r.name] = v;
        changed = true;
      }
    }
  }
  return m;
}

bool iteration_bodies_ok(const Node& n, const NullMap& rules) {
  if ((n.k == K::Star || n.k == K::LazyStar || n.k == K::Plus) && nullable(n.kids[0], rules)) return false;
  return std::all_of(n.kids.begin(), n.kids.end(), [&](const Node& k) { return iteration_bodies_ok(k, rules); });
}

struct Builder {
  Rng& rng;
  const GenOptions& o;
  const NullMap& nulls;
  std::vector<std::string> refs;
  bool mid = false;
  bool look = false;
  int* tags;
  int iters = 0;  // enclosing iterations within this rule

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng); }

  Node mid_leaf() {
    std::size_t r = pick(10);
    if (r < 4) return leaf(K::Lit, "b");
    if (r < 7 && !refs.empty()) return leaf(K::Ref, refs[pick(refs.size())]);
    if (r < 9) return wrap(K::Nested, chance(0.5) ? leaf(K::Lit, "b") : leaf(K::Empty));
    return leaf(K::Empty);
  }

  Node gen_leaf() {
    if (mid && !look) return mid_leaf();
    static const char* const kClasses[] = {"ab", "bc", "ac", "^a", "^c", "a-b"};
    std::size_t r = pick(20);
    if (r < 9) return leaf(K::Lit, std::string(1, "abc"[pick(3)]));
    if (r < 11) return leaf(K::Class, kClasses[pick(6)]);
    if (r < 13) return leaf(K::Any);
    if (r < 17 && !refs.empty()) return leaf(K::Ref, refs[pick(refs.size())]);
    if (r < 18) return wrap(K::Nested, Builder{rng, o, nulls, {}, true, false, tags}.mid_leaf());
    if (r < 19) return leaf(K::Empty);
    return leaf(K::Lit, std::string(1, "abc"[pick(3)]));
  }

  Node maybe_log(Node n) {
    if (!o.actions || !chance(o.action_rate)) return n;
    Node log = leaf(K::Log, "t" + std::to_string((*tags)++));
    if (chance(0.5)) return Node{K::Seq, {}, {std::move(log), std::move(n)}};
    return Node{K::Seq, {}, {std::move(n), std::move(log)}};
  }

  Node iteration_body(int depth) {
    Builder inner = *this;
    ++inner.iters;
    for (int attempt = 0; attempt < 5; ++attempt) {
      Node b = inner.gen(depth);
      if (!nullable(b, nulls) && iteration_bodies_ok(b, nulls)) return b;
    }
    return leaf(K::Lit, (mid && !look) ? "b" : std::string(1, "abc"[pick(3)]));
  }

  Node gen(int depth) {
    if (depth <= 0) return maybe_log(gen_leaf());
    std::size_t r = pick(100);
    if (r < 30) {
      Node s{K::Seq, {}, {}};
      std::size_t n = chance(0.3) ? 3 : 2;
      for (std::size_t i = 0; i < n; ++i) s.kids.push_back(gen(depth - 1));
      return maybe_log(std::move(s));
    }
    if (r < 55) {
      Node a{K::Alt, {}, {}};
      std::size_t n = chance(0.3) ? 3 : 2;
      for (std::size_t i = 0; i < n; ++i) a.kids.push_back(gen(depth - 1));
      return a;
    }
    // Deeply stacked iterations make the brute-force reference exponential.
    if (r >= 55 && r < 77 && iters >= 2) return wrap(K::Opt, gen(depth - 1));
    if (r < 65) return wrap(K::Star, iteration_body(depth - 1));
    if (r < 70) return wrap(K::LazyStar, iteration_body(depth - 1));
    if (r < 77) return wrap(K::Plus, iteration_body(depth - 1));
    if (r < 85) return wrap(K::Opt, gen(depth - 1));
    if (r < 95) {
      Builder inner = *this;
      inner.look = true;
      return wrap(r < 90 ? K::Not : K::And, inner.gen(depth - 1));
    }
    return maybe_log(gen_leaf());
  }
};

void collect(Node& n, std::vector<Node*>& out) {
  out.push_back(&n);
  for (auto& k : n.kids) collect(k, out);
}

std::vector<Node*> all_nodes(GenGrammar& g) {
  std::vector<Node*> out;
  for (auto& r : g.rules) collect(r.body, out);
  return out;
}

void replace_refs(Node& n, const std::string& name) {
  if (n.k == K::Ref && n.text == name) n = leaf(K::Lit, "b");
  for (auto& k : n.kids) replace_refs(k, name);
}

bool valid(const GenGrammar& g) {
  NullMap m = rule_nullability(g);
  return std::all_of(g.rules.begin(), g.rules.end(), [&](const RuleDef& r) { return iteration_bodies_ok(r.body, m); });
}

std::size_t weight(const Node& n) {
  std::size_t w = 1;
  for (const auto& k : n.kids) w += weight(k);
  return w;
}

}  // namespace

std::string GenGrammar::text() const {
  std::string out;
  for (const auto& r : rules) {
    out += r.name + " = ";
    if (r.nested) {
      out += "nested('a', ";
      print(r.body, out);
      out += ", 'c')";
    } else {
      print(r.body, out);
    }
    out += '\n';
  }
  return out;
}

Grammar GenGrammar::build() const { return load_grammar(text()); }

GenGrammar random_structured_grammar(Rng& rng, const GenOptions& opts) {
  std::size_t nrules = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, opts.max_rules))(rng);
  std::size_t max_nested = std::min(opts.max_nested_rules, nrules - 1);
  std::size_t nnested = std::uniform_int_distribution<std::size_t>(0, max_nested)(rng);
  std::size_t ngeneral = nrules - nnested;

  GenGrammar g;
  g.rules.resize(nrules);
  std::vector<std::string> nested_names;
  for (std::size_t i = 0; i < nnested; ++i) nested_names.push_back("n" + std::to_string(i + 1));
  for (std::size_t i = 0; i < ngeneral; ++i) g.rules[i].name = i == 0 ? "s" : "g" + std::to_string(i);
  for (std::size_t i = 0; i < nnested; ++i) {
    g.rules[ngeneral + i].name = nested_names[i];
    g.rules[ngeneral + i].nested = true;
  }

  NullMap nulls;
  for (const auto& n : nested_names) nulls[n] = false;
  int tags = 0;

  for (std::size_t i = 0; i < nnested; ++i) {
    Builder b{rng, opts, nulls, nested_names, true, false, &tags};
    g.rules[ngeneral + i].body = b.gen(opts.max_depth - 1);
  }
  for (std::size_t i = ngeneral; i-- > 0;) {
    std::vector<std::string> refs = nested_names;
    for (std::size_t j = i + 1; j < ngeneral; ++j) refs.push_back(g.rules[j].name);
    Builder b{rng, opts, nulls, refs, false, false, &tags};
    g.rules[i].body = b.gen(opts.max_depth);
    nulls[g.rules[i].name] = nullable(g.rules[i].body, nulls);
  }
  return g;
}

GenGrammar random_checkable_grammar(Rng& rng, const GenOptions& opts, const ProbeOptions& probe,
                                    std::size_t* resampled) {
  for (;;) {
    GenGrammar gg = random_structured_grammar(rng, opts);
    Grammar g = gg.build();
    OracleOptions oo;
    oo.max_steps = probe.probe_steps;
    bool ok = true;
    for (int i = 0; i < probe.probes && ok; ++i) {
      std::string s;
      for (std::size_t j = 0; j < probe.probe_len; ++j) s += "abc"[rng() % 3];
      try {
        oracle_parse(g, s, {}, oo);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetExceeded) throw;
        ok = false;
      }
    }
    if (ok) return gg;
    if (resampled) ++*resampled;
  }
}

std::vector<std::string> all_strings(std::string_view alphabet, std::size_t max_len) {
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char c : alphabet) out.push_back(out[i] + c);
    }
    begin = end;
  }
  return out;
}

std::string random_string(Rng& rng, std::string_view alphabet, std::size_t max_len) {
  std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  std::string s;
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (std::size_t i = 0; i < len; ++i) s += alphabet[pick(rng)];
  return s;
}

std::pair<GenGrammar, std::string> shrink(GenGrammar g, std::string input, const FailPredicate& fails,
                                          std::size_t max_rounds) {
  auto try_accept = [&](GenGrammar& cg, std::string& ci) {
    if (!valid(cg)) return false;
    try {
      if (!fails(cg, ci)) return false;
    } catch (...) {
      return false;
    }
    g = std::move(cg);
    input = std::move(ci);
    return true;
  };

  for (std::size_t round = 0; round < max_rounds; ++round) {
    bool progress = false;
    for (std::size_t i = 0; i < input.size() && !progress; ++i) {
      GenGrammar cg = g;
      std::string ci = input;
      ci.erase(i, 1);
      progress = try_accept(cg, ci);
    }
    for (std::size_t i = 1; i < g.rules.size() && !progress; ++i) {
      GenGrammar cg = g;
      std::string name = cg.rules[i].name;
      cg.rules.erase(cg.rules.begin() + static_cast<std::ptrdiff_t>(i));
      for (auto& r : cg.rules) replace_refs(r.body, name);
      std::string ci = input;
      progress = try_accept(cg, ci);
    }
    std::size_t count = all_nodes(g).size();
    for (std::size_t idx = 0; idx < count && !progress; ++idx) {
      Node target = *all_nodes(g)[idx];
      std::vector<Node> candidates;
      if (target.k != K::Empty) candidates.push_back(leaf(K::Empty));
      if (target.k != K::Not && target.k != K::And && target.k != K::Nested) {
        for (const auto& k : target.kids) candidates.push_back(k);
      }
      if ((target.k == K::Seq || target.k == K::Alt) && target.kids.size() > 1) {
        for (std::size_t j = 0; j < target.kids.size(); ++j) {
          Node c = target;
          c.kids.erase(c.kids.begin() + static_cast<std::ptrdiff_t>(j));
          candidates.push_back(std::move(c));
        }
      }
      for (auto& c : candidates) {
        if (weight(c) >= weight(target) && c.k != K::Empty) continue;
        GenGrammar cg = g;
        *all_nodes(cg)[idx] = c;
        std::string ci = input;
        if ((progress = try_accept(cg, ci))) break;
      }
    }
    for (std::size_t i = 0; i < input.size() && !progress; ++i) {
      if (input[i] == 'a') continue;
      GenGrammar cg = g;
      std::string ci = input;
      ci[i] = 'a';
      progress = try_accept(cg, ci);
    }
    if (!progress) break;
  }
  return {std::move(g), std::move(input)};
}

namespace {

struct JsonGen {
  Rng& rng;
  std::string out;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  void ws() {
    std::size_t r = pick(10);
    if (r < 6) return;
    if (r < 9) {
      out += ' ';
    } else {
      out += "\n  ";
    }
  }

  void string() {
    static const char kChars[] = "abcdefghijklmnopqrstuvwxyz0123456789 _-";
    out += '"';
    std::size_t n = pick(12);
    for (std::size_t i = 0; i < n; ++i) {
      if (pick(20) == 0) {
        out += pick(2) ? "\\\"" : "\\n";
      } else {
        out += kChars[pick(sizeof(kChars) - 1)];
      }
    }
    out += '"';
  }

  void number() {
    if (pick(4) == 0) out += '-';
    out += std::to_string(pick(100000));
    if (pick(3) == 0) out += "." + std::to_string(pick(1000));
  }

  void value(int depth) {
    std::size_t r = pick(depth <= 0 ? 6 : 10);
    switch (r) {
      case 0:
      case 1: string(); break;
      case 2:
      case 3: number(); break;
      case 4: out += "true"; break;
      case 5: out += pick(2) ? "false" : "null"; break;
      case 6:
      case 7:
      case 8: object(depth - 1); break;
      default: array(depth - 1); break;
    }
  }

  void object(int depth) {
    out += '{';
    std::size_t n = pick(6);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += ',';
      ws();
      string();
      ws();
      out += ':';
      ws();
      value(depth);
    }
    ws();
    out += '}';
  }

  void array(int depth) {
    out += '[';
    std::size_t n = pick(6);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += ',';
      ws();
      value(depth);
    }
    ws();
    out += ']';
  }
};

}  // namespace

std::string random_json(Rng& rng, std::size_t target_bytes) {
  JsonGen j{rng, {}};
  j.out += "[\n";
  bool first = true;
  while (j.out.size() < target_bytes) {
    if (!first) j.out += ",\n";
    first = false;
    j.object(4);
  }
  j.out += "\n]\n";
  return j.out;
}

std::vector<EditOp> random_edit_script(Rng& rng, std::size_t initial_len, std::size_t ops, double p_ins,
                                       double p_del) {
  static const char kChars[] = "abcxyz0123456789 ,:\"{}[]-.\n";
  std::vector<EditOp> out;
  std::size_t len = initial_len;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < ops; ++i) {
    double r = u(rng);
    EditOp op;
    if (r < p_ins) {
      op.kind = EditOp::Kind::Ins;
      op.pos = std::uniform_int_distribution<std::size_t>(0, len)(rng);
      op.ch = static_cast<unsigned char>(
          kChars[std::uniform_int_distribution<std::size_t>(0, sizeof(kChars) - 2)(rng)]);
      ++len;
    } else if (r < p_ins + p_del && len > 0) {
      op.kind = EditOp::Kind::Del;
      op.pos = std::uniform_int_distribution<std::size_t>(0, len - 1)(rng);
      --len;
    } else {
      op.kind = EditOp::Kind::Parse;
    }
    out.push_back(op);
  }
  return out;
}

std::string format_script(const std::vector<EditOp>& ops) {
  std::string out;
  for (const auto& op : ops) {
    switch (op.kind) {
      case EditOp::Kind::Ins: {
        out += "ins " + std::to_string(op.pos) + " ";
        if (op.ch > 0x20 && op.ch < 0x7f && op.ch != '#') {
          out += static_cast<char>(op.ch);
        } else {
          char buf[16];
          std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(op.ch));
          out += buf;
        }
        break;
      }
      case EditOp::Kind::Del: out += "del " + std::to_string(op.pos); break;
      case EditOp::Kind::Parse: out += "parse"; break;
    }
    out += '\n';
  }
  return out;
}

}  // namespace regreg::gen
