#include <doctest.h>

#include <map>
#include <random>
#include <regex>

#include "regreg/generate.hpp"
#include "support.hpp"

using namespace regreg;

namespace {

// Stop ids come from a pool-wide counter, so dumps are compared with
// synthesized ids renumbered by first appearance. Id 0 is `break`.
std::string canonical_stops(const std::string& dump) {
  static const std::regex stop("Stop([0-9]+)");
  std::map<std::string, std::string> renamed;
  std::string out;
  auto begin = std::sregex_iterator(dump.begin(), dump.end(), stop);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    out += dump.substr(last, static_cast<std::size_t>(m.position()) - last);
    std::string id = m[1].str();
    if (id != "0") {
      auto [r, fresh] = renamed.emplace(id, std::to_string(renamed.size() + 1));
      id = "s" + r->second;
    }
    out += "Stop" + id;
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  return out + dump.substr(last);
}

// Rule name -> structural dump, for comparing documents across pools.
std::map<std::string, std::string> shape(const GrammarDoc& d) {
  std::map<std::string, std::string> out;
  for (const RuleDecl& r : d.rules) {
    out[r.name] = r.params.empty() ? canonical_stops(dump_expr(*d.pool, r.body)) : "template:" + r.body_text;
  }
  out["@start"] = d.start;
  return out;
}

std::string squash(const std::string& s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '\n') out += c;
  return out;
}

void check_span(const Error& e, const std::string& text) {
  REQUIRE(e.has_span());
  const SourceSpan& sp = e.span();
  CHECK(sp.byte_start <= sp.byte_end);
  CHECK(sp.byte_end <= text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < sp.byte_start && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      ++col;
    }
  }
  CHECK(sp.line == line);
  CHECK(sp.col == col);
}

}  // namespace

TEST_CASE("hello grammar") {
  Grammar g = load_grammar(rt::grammar_file("hello.peg"));
  CHECK(rt::whole(parse(g, "hello   world"), 13));
  CHECK(rt::whole(parse(g, "hello world"), 11));
  CHECK_FALSE(parse(g, "helloworld").success);
}

TEST_CASE("digit list") {
  Grammar g = load_grammar("int = '-'? digit+\ndigit = <0-9>");
  auto r = parse(g, "421");
  REQUIRE(rt::whole(r, 3));
  REQUIRE(r.value.kind() == Value::Kind::Node);
  CHECK(r.value.rule() == "int");
  REQUIRE(r.value.children().size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const Value& d = r.value.children()[i];
    CHECK(d.rule() == "digit");
    CHECK(d.span() == Span{i, i + 1});
  }
  CHECK(oracle_parse(g, "421").value == r.value);
}

TEST_CASE("empty and comment-only files") {
  CHECK(parse_grammar("").rules.empty());
  CHECK(parse_grammar("# nothing here\n\n").rules.empty());
}

TEST_CASE("start directive and default start") {
  auto d = parse_grammar("a = 'x'\nb = 'y'\n");
  CHECK(d.start == "a");
  CHECK_FALSE(d.explicit_start);
  d = parse_grammar("a = 'x'\n@start b\nb = 'y'\n");
  CHECK(d.start == "b");
  CHECK(d.explicit_start);
  Grammar g = load_grammar("a = 'x'\n@start b\nb = 'y'\n");
  CHECK(parse(g, "y").success);
  CHECK_FALSE(parse(g, "x").success);
}

TEST_CASE("continuation lines belong to the previous rule") {
  Grammar g = load_grammar("s = 'a'\n    'b'\n  | 'c'\nt = 'd'");
  CHECK(rt::whole(parse(g, "ab"), 2));
  CHECK(rt::whole(parse(g, "c"), 1));
  CHECK(rt::whole(parse(g, "d", "t"), 1));
}

TEST_CASE("token literals skip leading whitespace") {
  Grammar g = load_grammar("s = \"foo\" \"bar\"");
  CHECK(rt::whole(parse(g, "foo  bar"), 8));
  CHECK(rt::whole(parse(g, " \tfoobar"), 8));
  Grammar exact = load_grammar("s = 'foo' 'bar'");
  CHECK_FALSE(parse(exact, " foobar").success);
}

TEST_CASE("escapes") {
  Grammar g = load_grammar(R"(s = '\n' '\t' '\\' '\'' <\-\>> "\"")");
  CHECK(rt::whole(parse(g, "\n\t\\'-\""), 6));
  CHECK(rt::whole(parse(g, "\n\t\\'>\""), 6));
  auto bad = rt::error_of([] { parse_grammar(R"(s = '\q')"); });
  CHECK(bad == ErrorCode::SyntaxError);
}

TEST_CASE("binding binds tighter than postfix operators") {
  auto d1 = parse_grammar("s = 'a':x?");
  auto d2 = parse_grammar("s = ('a':x)?");
  CHECK(shape(d1)["s"] == shape(d2)["s"]);
  auto d3 = parse_grammar("s = ('a'?):x");
  CHECK(shape(d1)["s"] != shape(d3)["s"]);
}

TEST_CASE("templates are expanded at call sites") {
  Grammar g = load_grammar("s = tok('a') tok(<0-9>)\ntok(x) = ' '* x");
  CHECK(rt::whole(parse(g, "  a 7"), 5));
  CHECK(rt::error_of([] { parse_grammar("s = tok\ntok(x) = x"); }) == ErrorCode::SyntaxError);
  CHECK(rt::error_of([] { parse_grammar("s = t('a')\nt = 'b'"); }) == ErrorCode::SyntaxError);
}

TEST_CASE("reference errors") {
  CHECK(rt::error_of([] { parse_grammar("s = t"); }) == ErrorCode::UnknownRule);
  CHECK(rt::error_of([] { parse_grammar("s = 'a'\ns = 'b'"); }) == ErrorCode::DuplicateRule);
  CHECK(rt::error_of([] { parse_grammar("s = 'a' {@nope}"); }) == ErrorCode::UnknownActionHandle);
  CHECK_FALSE(rt::error_of([] { parse_grammar("s = 'a' {@log_x}"); }).has_value());
}

TEST_CASE("printing") {
  auto d = parse_grammar("a = 'x'");
  CHECK(squash(print_grammar(d)) == "a='x'");
  auto c = parse_grammar("b = 'p' | 'q' | 'r'");
  CHECK(squash(print_grammar(c)) == "b='p'|'q'|'r'");
}

TEST_CASE("calculator round-trips") {
  const std::string text = rt::grammar_file("calculator.peg");
  auto d1 = parse_grammar(text);
  auto d2 = parse_grammar(print_grammar(d1));
  CHECK(shape(d1) == shape(d2));
  CHECK(print_grammar(d2) == print_grammar(d1));
}

TEST_CASE("shipped grammars round-trip") {
  for (const char* f : {"json.peg", "pathological.peg", "sizes.peg", "hello.peg"}) {
    CAPTURE(f);
    auto d1 = parse_grammar(rt::grammar_file(f));
    auto d2 = parse_grammar(print_grammar(d1));
    CHECK(shape(d1) == shape(d2));
  }
}

TEST_CASE("property: random documents round-trip through the printer") {
  gen::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    gen::GenOptions o;
    o.actions = i % 2 == 0;
    gen::GenGrammar gg = gen::random_structured_grammar(rng, o);
    std::string text = gg.text();
    CAPTURE(text);
    auto d1 = parse_grammar(text);
    std::string printed = print_grammar(d1);
    CAPTURE(printed);
    auto d2 = parse_grammar(printed);
    REQUIRE(shape(d1) == shape(d2));
    CHECK(print_grammar(d2) == printed);
  }
}

TEST_CASE("property: syntax errors carry spans inside the text") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> seeds{rt::grammar_file("calculator.peg"), rt::grammar_file("json.peg"),
                                       "s = nested('(', s | (), ')') ~. {@id}\nt = <a-z>+:x 'é'"};
  const std::string noise = "()'\"<>|*+?~&:{}@=.\\\n -#[]";
  std::size_t syntax_errors = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string text = seeds[rng() % seeds.size()];
    int edits = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < edits && !text.empty(); ++k) {
      std::size_t pos = rng() % text.size();
      if (rng() % 2) {
        text.erase(pos, 1);
      } else {
        text.insert(pos, 1, noise[rng() % noise.size()]);
      }
    }
    try {
      parse_grammar(text);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SyntaxError) {
        ++syntax_errors;
        CAPTURE(text);
        CAPTURE(e.what());
        check_span(e, text);
      }
    }
  }
  CHECK(syntax_errors > 200);
}
