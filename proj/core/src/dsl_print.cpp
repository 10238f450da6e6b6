#include "regreg/dsl.hpp"
#include "regreg/utf8.hpp"

namespace regreg {

namespace {

void escape_into(std::string& out, char32_t c) {
  switch (c) {
    case '\n': out += "\\n"; break;
    case '\r': out += "\\r"; break;
    case '\t': out += "\\t"; break;
    case '\\': out += "\\\\"; break;
    case '\'': out += "\\'"; break;
    case '"': out += "\\\""; break;
    default: utf8::append(out, c);
  }
}

class Printer {
 public:
  explicit Printer(const ExprPool& p) : p_(p) {}

  // Levels: 0 choice, 1 sequence, 2 prefix, 3 postfix operand.
  std::string print(ExprId e, int level) {
    const ExprNode& n = p_.node(e);
    if (auto la = p_.as_lookahead(e)) {
      std::string s = (la->negative ? "~" : "&") + print(la->body, 2);
      return level > 2 ? "(" + s + ")" : s;
    }
    if (p_.is_choice(e) || p_.as_commit(e)) {
      if (p_.is_choice(e) && n.kids[2] == p_.empty() && !p_.as_commit(n.kids[0])) {
        std::string s = print(n.kids[0], 3);
        if (s.back() == '*') s = "(" + s + ")";  // `x*?` would read as a lazy star
        return s + "?";
      }
      std::string s = alternatives(e);
      return level > 0 ? "(" + s + ")" : s;
    }
    switch (n.kind) {
      case Kind::Seq: {
        std::string s = sequence(e);
        return level > 1 ? "(" + s + ")" : s;
      }
      case Kind::Many: return many(e);
      case Kind::CharSet: return p_.charset(e).to_string();
      case Kind::Nested:
        return "nested(" + print(n.kids[0], 0) + ", " + print(n.kids[1], 0) + ", " + print(n.kids[2], 0) + ")";
      case Kind::RuleRef: return p_.name(n.payload);
      case Kind::Act: return "{@" + p_.name(n.payload) + "}";
      case Kind::Bind: return print(n.kids[0], 3) + ":" + p_.name(n.payload);
      case Kind::Enter:
        if (n.kids[0] == p_.any_item()) return "[" + print(n.kids[1], 0) + "]";
        break;
      case Kind::Fail: return "fail";
      case Kind::Empty: return "()";
      case Kind::AnyItem: return ".";
      case Kind::Stop:
        if (n.payload == kBreakStop) return "break";
        break;
      default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "expression has no DSL form: " + dump_expr(p_, e));
  }

 private:
  std::string alternatives(ExprId e) {
    std::vector<std::string> alts;
    bool trailing_fail_ok = false;
    for (;;) {
      if (auto c = p_.as_commit(e)) {
        std::string prefix = print(c->prefix, 1);
        std::string s = prefix + " break";
        if (c->tail != p_.empty()) s += " " + print(c->tail, 1);
        alts.push_back(s);
        e = c->rest;
        trailing_fail_ok = true;
        continue;
      }
      if (p_.is_choice(e)) {
        alts.push_back(print(p_.node(e).kids[0], 1));
        e = p_.node(e).kids[2];
        trailing_fail_ok = false;
        continue;
      }
      break;
    }
    if (!(trailing_fail_ok && e == p_.fail())) alts.push_back(print(e, 1));
    std::string out;
    for (std::size_t i = 0; i < alts.size(); ++i) {
      if (i) out += " | ";
      out += alts[i];
    }
    return out;
  }

  bool is_ws_many(ExprId e) const {
    const ExprNode& n = p_.node(e);
    if (n.kind != Kind::Many || n.eager || !p_.is_choice(n.kids[0])) return false;
    const ExprNode& b = p_.node(n.kids[0]);
    if (p_.kind(b.kids[2]) != Kind::Stop || p_.kind(b.kids[0]) != Kind::CharSet) return false;
    static const CharClassSet ws = CharClassSet::from_ranges({{'\t', '\n'}, {'\r', '\r'}, {' ', ' '}});
    return p_.charset(b.kids[0]) == ws;
  }

  std::optional<char32_t> single(ExprId e) const {
    if (p_.kind(e) != Kind::CharSet) return std::nullopt;
    return p_.charset(e).single_char();
  }

  std::string sequence(ExprId e) {
    std::vector<ExprId> parts;
    while (p_.kind(e) == Kind::Seq) {
      parts.push_back(p_.node(e).kids[0]);
      e = p_.node(e).kids[1];
    }
    parts.push_back(e);
    std::vector<std::string> items;
    for (std::size_t i = 0; i < parts.size();) {
      bool token = is_ws_many(parts[i]) && i + 1 < parts.size() && single(parts[i + 1]);
      if (token || single(parts[i])) {
        std::size_t j = token ? i + 1 : i;
        char quote = token ? '"' : '\'';
        std::string lit(1, quote);
        while (j < parts.size() && single(parts[j])) escape_into(lit, *single(parts[j++]));
        items.push_back(lit + quote);
        i = j;
        continue;
      }
      items.push_back(print(parts[i], 2));
      ++i;
    }
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += " ";
      out += items[i];
    }
    return out;
  }

  std::string many(ExprId e) {
    const ExprNode& n = p_.node(e);
    ExprId body = n.kids[0];
    const ExprNode& b = p_.node(body);
    if (p_.is_choice(body)) {
      auto synthesized = [&](ExprId s) { return p_.kind(s) == Kind::Stop && p_.node(s).payload != kBreakStop; };
      if (!n.eager && synthesized(b.kids[2])) return print(b.kids[0], 3) + "*";
      if (n.eager && synthesized(b.kids[0])) return print(b.kids[2], 3) + "*?";
    }
    return print(body, 3) + (n.eager ? "*?" : "*");
  }

  const ExprPool& p_;
};

}  // namespace

std::string print_expr(const ExprPool& pool, ExprId e) { return Printer(pool).print(e, 0); }

std::string print_grammar(const GrammarDoc& doc) {
  std::string out;
  if (doc.explicit_start) out += "@start " + doc.start + "\n";
  for (const auto& r : doc.rules) {
    out += r.name;
    if (!r.params.empty()) {
      out += "(";
      for (std::size_t i = 0; i < r.params.size(); ++i) {
        if (i) out += ", ";
        out += r.params[i];
      }
      out += ") = " + r.body_text + "\n";
      continue;
    }
    out += " = " + print_expr(*doc.pool, r.body) + "\n";
  }
  return out;
}

}  // namespace regreg
