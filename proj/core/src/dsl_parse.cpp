#include <algorithm>
#include <unordered_map>

#include "regreg/dsl.hpp"
#include "regreg/utf8.hpp"

namespace regreg {

namespace {

enum class Tok { Ident, Lit, Token, Class, Punct, At, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;     // identifier, punctuation or directive name
  std::u32string chars;  // decoded literal
  CharClassSet cls;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool is_keyword(std::string_view s) { return s == "nested" || s == "fail" || s == "break"; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n') line_starts_.push_back(i + 1);
    }
  }

  SourceSpan span(std::size_t b, std::size_t e) const {
    b = std::min(b, text_.size());
    e = std::clamp(e, b, text_.size());
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), b);
    std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
    // Columns count scalars, not bytes.
    std::size_t col = 1;
    for (std::size_t i = line_starts_[line - 1]; i < b; ++i) {
      if ((static_cast<unsigned char>(text_[i]) & 0xC0) != 0x80) ++col;
    }
    return SourceSpan{b, e, line, col};
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t b, std::size_t e) const {
    SourceSpan s = span(b, e);
    throw Error(ErrorCode::SyntaxError,
                msg + " at " + std::to_string(s.line) + ":" + std::to_string(s.col), s);
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.begin = pos_;
      if (pos_ >= text_.size()) {
        t.kind = Tok::Eof;
        t.end = pos_;
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (ident_start(c)) {
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        t.kind = Tok::Ident;
        t.text = std::string(text_.substr(t.begin, pos_ - t.begin));
      } else if (c == '@') {
        ++pos_;
        std::size_t b = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        if (b == pos_) fail("expected a name after '@'", t.begin, pos_);
        t.kind = Tok::At;
        t.text = std::string(text_.substr(b, pos_ - b));
      } else if (c == '\'' || c == '"') {
        ++pos_;
        t.kind = c == '\'' ? Tok::Lit : Tok::Token;
        for (;;) {
          if (pos_ >= text_.size()) fail("unterminated literal", t.begin, pos_);
          if (text_[pos_] == c) {
            ++pos_;
            break;
          }
          t.chars.push_back(next_char());
        }
      } else if (c == '<') {
        ++pos_;
        t.kind = Tok::Class;
        bool negated = false;
        if (pos_ < text_.size() && text_[pos_] == '^') {
          negated = true;
          ++pos_;
        }
        std::vector<CharRange> ranges;
        for (;;) {
          if (pos_ >= text_.size()) fail("unterminated character class", t.begin, pos_);
          if (text_[pos_] == '>') {
            ++pos_;
            break;
          }
          char32_t lo = next_char();
          char32_t hi = lo;
          if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] != '>') {
            ++pos_;
            hi = next_char();
            if (hi < lo) fail("inverted range in character class", t.begin, pos_);
          }
          ranges.push_back({lo, hi});
        }
        t.cls = CharClassSet::from_ranges(std::move(ranges), negated);
      } else {
        static const std::string_view kPunct = "=|(),~&*+?:.[]{}";
        if (kPunct.find(c) == std::string_view::npos) {
          fail(std::string("unexpected character '") + c + "'", pos_, pos_ + 1);
        }
        ++pos_;
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
        if (c == '*' && pos_ < text_.size() && text_[pos_] == '?') {
          ++pos_;
          t.text = "*?";
        }
      }
      t.end = pos_;
      out.push_back(std::move(t));
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else {
        return;
      }
    }
  }

  char32_t next_char() {
    std::size_t at = pos_;
    if (text_[pos_] == '\\') {
      if (pos_ + 1 >= text_.size()) fail("dangling escape", at, pos_ + 1);
      char e = text_[pos_ + 1];
      pos_ += 2;
      switch (e) {
        case 'n': return '\n';
        case 'r': return '\r';
        case 't': return '\t';
        case '\\': return '\\';
        case '\'': return '\'';
        case '"': return '"';
        case '>': return '>';
        case '-': return '-';
        default: fail(std::string("unknown escape '\\") + e + "'", at, pos_);
      }
    }
    auto d = utf8::decode_at(text_, pos_);
    if (!d) fail("malformed UTF-8", at, at + 1);
    pos_ += d->length;
    return d->scalar;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> line_starts_;
};

struct Header {
  std::string name;
  std::vector<std::string> params;
  std::size_t name_tok;
  std::size_t body_begin;
  std::size_t body_end;  // exclusive token index
};

// An expression plus the `break`s inside it not yet enclosed by a loop.
struct Parsed {
  ExprId e;
  std::vector<SourceSpan> open_breaks;
};

class Parser {
 public:
  Parser(std::string_view text, std::shared_ptr<const ActionRegistry> actions, std::shared_ptr<ExprPool> pool)
      : text_(text), lex_(text), actions_(std::move(actions)), pool_(std::move(pool)) {
    toks_ = lex_.run();
    ws_ = pool_->mk_many(pool_->mk_charset(CharClassSet::from_ranges({{'\t', '\n'}, {'\r', '\r'}, {' ', ' '}})));
  }

  GrammarDoc run() {
    GrammarDoc doc;
    doc.pool = pool_;
    std::vector<Header> headers = scan_headers(doc);
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < headers.size(); ++i) {
      const Header& h = headers[i];
      const Token& nt = toks_[h.name_tok];
      if (seen.count(h.name)) {
        throw Error(ErrorCode::DuplicateRule, "rule '" + h.name + "' defined twice", lex_.span(nt.begin, nt.end));
      }
      seen.emplace(h.name, i);
      if (!h.params.empty()) templates_.emplace(h.name, i);
    }
    headers_ = headers;
    for (const Header& h : headers_) {
      RuleDecl d;
      d.name = h.name;
      d.params = h.params;
      std::size_t last = h.body_end > h.body_begin ? h.body_end - 1 : h.body_begin - 1;
      d.span = lex_.span(toks_[h.name_tok].begin, toks_[last].end);
      if (h.params.empty()) {
        d.body = parse_body(h, {});
      } else {
        std::size_t b = toks_[h.body_begin].begin;
        std::size_t e = h.body_begin < h.body_end ? toks_[h.body_end - 1].end : b;
        d.body_text = std::string(text_.substr(b, e - b));
        std::unordered_map<std::string, ExprId> probe;
        for (const auto& p : h.params) probe.emplace(p, pool_->empty());
        parse_body(h, probe);  // syntax check only; the body is expanded per call
      }
      doc.rules.push_back(std::move(d));
    }
    if (!doc.explicit_start) {
      for (const auto& r : doc.rules) {
        if (r.params.empty()) {
          doc.start = r.name;
          break;
        }
      }
    }
    for (const auto& [sym, span] : refs_) {
      const std::string& n = pool_->name(sym);
      auto it = seen.find(n);
      if (it == seen.end()) throw Error(ErrorCode::UnknownRule, "undefined rule '" + n + "'", span);
      if (!headers_[it->second].params.empty()) {
        throw Error(ErrorCode::SyntaxError, "template '" + n + "' used without arguments", span);
      }
    }
    if (doc.explicit_start) {
      auto it = seen.find(doc.start);
      if (it == seen.end() || !headers_[it->second].params.empty()) {
        throw Error(ErrorCode::UnknownRule, "start rule '" + doc.start + "' is not defined", start_span_);
      }
    }
    return doc;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at_end() const { return pos_ >= limit_ || cur().kind == Tok::Eof; }
  bool punct(std::string_view p) const { return !at_end() && cur().kind == Tok::Punct && cur().text == p; }
  bool ident(std::string_view s) const { return !at_end() && cur().kind == Tok::Ident && cur().text == s; }

  [[noreturn]] void fail_here(const std::string& msg) const {
    const Token& t = toks_[std::min(pos_, toks_.size() - 1)];
    lex_.fail(msg, t.begin, t.end);
  }

  void expect_punct(std::string_view p) {
    if (!punct(p)) fail_here("expected '" + std::string(p) + "'");
    ++pos_;
  }

  bool rule_start_at(std::size_t i, std::size_t* body_begin, std::vector<std::string>* params) const {
    if (toks_[i].kind != Tok::Ident) return false;
    std::size_t j = i + 1;
    std::vector<std::string> ps;
    if (toks_[j].kind == Tok::Punct && toks_[j].text == "(") {
      ++j;
      for (;;) {
        if (toks_[j].kind != Tok::Ident) return false;
        ps.push_back(toks_[j].text);
        ++j;
        if (toks_[j].kind == Tok::Punct && toks_[j].text == ",") {
          ++j;
          continue;
        }
        if (toks_[j].kind == Tok::Punct && toks_[j].text == ")") {
          ++j;
          break;
        }
        return false;
      }
    }
    if (toks_[j].kind != Tok::Punct || toks_[j].text != "=") return false;
    if (body_begin) *body_begin = j + 1;
    if (params) *params = std::move(ps);
    return true;
  }

  bool action_handle_at(std::size_t k) const {
    return k > 0 && toks_[k - 1].kind == Tok::Punct && toks_[k - 1].text == "{";
  }

  std::vector<Header> scan_headers(GrammarDoc& doc) {
    std::vector<Header> out;
    std::size_t i = 0;
    auto boundary = [&](std::size_t k) {
      return toks_[k].kind == Tok::Eof || (toks_[k].kind == Tok::At && !action_handle_at(k)) ||
             rule_start_at(k, nullptr, nullptr);
    };
    while (toks_[i].kind != Tok::Eof) {
      const Token& t = toks_[i];
      if (t.kind == Tok::At) {
        if (t.text != "start") lex_.fail("unknown directive '@" + t.text + "'", t.begin, t.end);
        if (toks_[i + 1].kind != Tok::Ident) lex_.fail("expected rule name after @start", t.begin, t.end);
        doc.start = toks_[i + 1].text;
        doc.explicit_start = true;
        start_span_ = lex_.span(toks_[i + 1].begin, toks_[i + 1].end);
        i += 2;
        continue;
      }
      Header h;
      if (!rule_start_at(i, &h.body_begin, &h.params)) lex_.fail("expected a rule definition", t.begin, t.end);
      if (is_keyword(t.text)) lex_.fail("'" + t.text + "' is reserved", t.begin, t.end);
      h.name = t.text;
      h.name_tok = i;
      std::size_t k = h.body_begin;
      while (!boundary(k)) ++k;
      h.body_end = k;
      out.push_back(std::move(h));
      i = k;
    }
    return out;
  }

  ExprId parse_body(const Header& h, std::unordered_map<std::string, ExprId> env) {
    std::size_t saved_pos = pos_, saved_limit = limit_;
    pos_ = h.body_begin;
    limit_ = h.body_end;
    envs_.push_back(std::move(env));
    Parsed p = expr();
    if (!at_end()) fail_here("unexpected token");
    if (!p.open_breaks.empty()) {
      throw Error(ErrorCode::SyntaxError, "'break' outside of an iteration", p.open_breaks.front());
    }
    envs_.pop_back();
    pos_ = saved_pos;
    limit_ = saved_limit;
    return p.e;
  }

  Parsed expr() {
    struct Alt {
      ExprId prefix;
      bool brk;
      ExprId tail;
    };
    std::vector<Alt> alts;
    std::vector<SourceSpan> breaks;
    for (;;) {
      std::vector<ExprId> before, after;
      bool brk = false;
      while (!at_end() && !punct("|") && !punct(")") && !punct(",") && !punct("]")) {
        if (ident("break")) {
          if (brk) fail_here("second 'break' in one alternative");
          brk = true;
          breaks.push_back(lex_.span(cur().begin, cur().end));
          ++pos_;
          continue;
        }
        Parsed item = prefix();
        breaks.insert(breaks.end(), item.open_breaks.begin(), item.open_breaks.end());
        (brk ? after : before).push_back(item.e);
      }
      alts.push_back({pool_->mk_seq(before), brk, pool_->mk_seq(after)});
      if (!punct("|")) break;
      ++pos_;
    }
    ExprId acc = pool_->fail();
    std::vector<ExprId> run;  // plain alternatives waiting to be folded in front of acc
    auto flush = [&] {
      if (run.empty()) return;
      std::reverse(run.begin(), run.end());
      run.push_back(acc);
      acc = pool_->mk_choice(run);
      run.clear();
    };
    for (auto it = alts.rbegin(); it != alts.rend(); ++it) {
      if (it->brk) {
        flush();
        acc = pool_->commit(it->prefix, it->tail, acc);
      } else {
        run.push_back(it->prefix);
      }
    }
    flush();
    return {acc, breaks};
  }

  Parsed prefix() {
    if (punct("~") || punct("&")) {
      bool neg = cur().text == "~";
      ++pos_;
      Parsed inner = prefix();
      if (!inner.open_breaks.empty()) {
        throw Error(ErrorCode::SyntaxError, "'break' inside a lookahead", inner.open_breaks.front());
      }
      return {neg ? pool_->mk_not(inner.e) : pool_->mk_and(inner.e), {}};
    }
    return postfix();
  }

  Parsed postfix() {
    Parsed p = primary();
    for (;;) {
      if (punct("*") || punct("*?")) {
        bool eager = cur().text == "*?";
        ++pos_;
        p = {pool_->mk_many(p.e, eager), {}};
      } else if (punct("+")) {
        if (!p.open_breaks.empty()) {
          throw Error(ErrorCode::SyntaxError, "'break' under '+' escapes its first iteration",
                      p.open_breaks.front());
        }
        ++pos_;
        p.e = pool_->mk_seq(p.e, pool_->mk_many(p.e));
      } else if (punct("?")) {
        ++pos_;
        p.e = pool_->mk_choice({p.e, pool_->empty()});
      } else if (punct(":")) {
        ++pos_;
        if (at_end() || cur().kind != Tok::Ident || is_keyword(cur().text)) fail_here("expected a binding name");
        p.e = pool_->mk_bind(cur().text, p.e);
        ++pos_;
      } else {
        return p;
      }
    }
  }

  Parsed closed(Parsed p, const char* where) {
    if (!p.open_breaks.empty()) {
      throw Error(ErrorCode::SyntaxError, std::string("'break' outside of an iteration inside ") + where,
                  p.open_breaks.front());
    }
    return p;
  }

  Parsed primary() {
    if (at_end()) fail_here("expected an expression");
    const Token t = cur();
    switch (t.kind) {
      case Tok::Lit: ++pos_; return {pool_->literal(t.chars), {}};
      case Tok::Token: ++pos_; return {pool_->mk_seq(ws_, pool_->literal(t.chars)), {}};
      case Tok::Class: ++pos_; return {pool_->mk_charset(t.cls), {}};
      case Tok::Punct:
        if (t.text == ".") {
          ++pos_;
          return {pool_->any_item(), {}};
        }
        if (t.text == "(") {
          ++pos_;
          if (punct(")")) {
            ++pos_;
            return {pool_->empty(), {}};
          }
          Parsed inner = expr();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[") {
          ++pos_;
          Parsed inner = closed(expr(), "[...]");
          expect_punct("]");
          return {pool_->mk_enter(pool_->any_item(), inner.e), {}};
        }
        if (t.text == "{") {
          ++pos_;
          if (at_end() || cur().kind != Tok::At) fail_here("expected '{@handle}'");
          const Token h = cur();
          ++pos_;
          expect_punct("}");
          if (!actions_->contains(h.text)) {
            throw Error(ErrorCode::UnknownActionHandle, "no action registered as '" + h.text + "'",
                        lex_.span(h.begin, h.end));
          }
          return {pool_->mk_act(h.text), {}};
        }
        fail_here("unexpected '" + t.text + "'");
      case Tok::Ident: return identifier();
      default: fail_here("expected an expression");
    }
  }

  Parsed identifier() {
    const Token t = cur();
    ++pos_;
    if (t.text == "fail") return {pool_->fail(), {}};
    if (t.text == "break") lex_.fail("'break' must separate a sequence", t.begin, t.end);
    if (t.text == "nested") {
      expect_punct("(");
      ExprId a = closed(expr(), "nested").e;
      expect_punct(",");
      ExprId b = closed(expr(), "nested").e;
      expect_punct(",");
      ExprId c = closed(expr(), "nested").e;
      expect_punct(")");
      return {pool_->mk_nested(a, b, c), {}};
    }
    for (auto it = envs_.rbegin(); it != envs_.rend(); ++it) {
      if (auto f = it->find(t.text); f != it->end()) return {f->second, {}};
      break;  // templates see only their own parameters
    }
    if (auto tp = templates_.find(t.text); tp != templates_.end()) {
      const Header& h = headers_[tp->second];
      if (!call_paren(t)) lex_.fail("template '" + t.text + "' needs arguments", t.begin, t.end);
      ++pos_;
      std::vector<ExprId> args;
      for (;;) {
        if (at_end()) fail_here("unterminated argument list");
        const Token a = cur();
        if (a.kind == Tok::Lit) {
          args.push_back(pool_->literal(a.chars));
        } else if (a.kind == Tok::Token) {
          args.push_back(pool_->mk_seq(ws_, pool_->literal(a.chars)));
        } else if (a.kind == Tok::Class) {
          args.push_back(pool_->mk_charset(a.cls));
        } else {
          fail_here("template arguments must be literals or character classes");
        }
        ++pos_;
        if (punct(",")) {
          ++pos_;
          continue;
        }
        expect_punct(")");
        break;
      }
      if (args.size() != h.params.size()) {
        lex_.fail("template '" + t.text + "' takes " + std::to_string(h.params.size()) + " arguments", t.begin,
                  t.end);
      }
      if (++depth_ > 64) lex_.fail("template expansion too deep", t.begin, t.end);
      std::unordered_map<std::string, ExprId> env;
      for (std::size_t i = 0; i < args.size(); ++i) env.emplace(h.params[i], args[i]);
      ExprId body = parse_body(h, std::move(env));
      --depth_;
      return {body, {}};
    }
    if (call_paren(t)) lex_.fail("'" + t.text + "' is not a template", t.begin, t.end);
    Symbol s = pool_->intern(t.text);
    refs_.emplace(s, lex_.span(t.begin, t.end));
    return {pool_->mk_rule_ref(s), {}};
  }

  // A call needs '(' directly after the name; `r (x)` is a sequence.
  bool call_paren(const Token& name) const { return punct("(") && cur().begin == name.end; }

  std::string_view text_;
  Lexer lex_;
  std::shared_ptr<const ActionRegistry> actions_;
  std::shared_ptr<ExprPool> pool_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t limit_ = 0;
  std::vector<Header> headers_;
  std::unordered_map<std::string, std::size_t> templates_;
  std::vector<std::unordered_map<std::string, ExprId>> envs_;
  std::unordered_map<Symbol, SourceSpan> refs_;
  SourceSpan start_span_;
  ExprId ws_;
  int depth_ = 0;
};

}  // namespace

GrammarDoc parse_grammar(std::string_view text, std::shared_ptr<const ActionRegistry> actions,
                         std::shared_ptr<ExprPool> pool) {
  if (!pool) pool = std::make_shared<ExprPool>();
  if (!actions) actions = ActionRegistry::standard();
  return Parser(text, std::move(actions), std::move(pool)).run();
}

Grammar GrammarDoc::to_grammar(std::shared_ptr<const ActionRegistry> actions) const {
  Grammar g(pool, std::move(actions));
  for (const auto& r : rules) {
    if (r.params.empty()) g.add_rule(r.name, r.body);
  }
  if (!start.empty()) g.set_start(start);
  return g;
}

Grammar load_grammar(std::string_view text, std::shared_ptr<const ActionRegistry> actions) {
  GrammarDoc doc = parse_grammar(text, actions);
  Grammar g = doc.to_grammar(actions);
  g.finalize();
  return g;
}

}  // namespace regreg
