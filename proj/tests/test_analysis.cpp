#include <doctest.h>

#include <random>

#include "regreg/analysis.hpp"
#include "regreg/generate.hpp"
#include "support.hpp"

using namespace regreg;

namespace {

ExprId body(const Grammar& g, const char* rule) { return g.body(*g.pool().lookup(rule)); }

std::string random_expr(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  static const char* atoms[] = {"'a'", "'b'", "'c'", "'ab'", "'ba'", "<a-b>", "."};
  if (depth == 0) return atoms[pick(7)];
  switch (pick(6)) {
    case 0: return random_expr(rng, depth - 1) + " " + random_expr(rng, depth - 1);
    case 1: return "(" + random_expr(rng, depth - 1) + " | " + random_expr(rng, depth - 1) + ")";
    case 2: return "(" + random_expr(rng, depth - 1) + ")?";
    case 3: return "('" + std::string(1, "abc"[pick(3)]) + "' " + random_expr(rng, depth - 1) + ")*";
    case 4: return "~'" + std::string(1, "abc"[pick(3)]) + "' " + random_expr(rng, depth - 1);
    default: return atoms[pick(7)];
  }
}

}  // namespace

TEST_CASE("approximations of simple expressions") {
  Grammar g = load_grammar("a = 'a'\nn = nested('(', x, ')')\nx = 'x'\nu = 'a' | 'ab'");
  Analyzer an(g);
  RegexApprox ra = an.approx(body(g, "a"));
  CHECK(ra.accepts("a"));
  for (const char* s : {"", "aa", "b"}) CHECK_FALSE(ra.accepts(s));

  RegexApprox rn = an.approx(body(g, "n"));
  CHECK(rn.accepts("(zzz)"));
  CHECK(rn.accepts("()"));
  CHECK_FALSE(rn.accepts("(zzz"));

  RegexApprox ru = an.approx(body(g, "u"));
  CHECK(ru.accepts("a"));
  CHECK(ru.accepts("ab"));
  CHECK_FALSE(ru.accepts("b"));
}

TEST_CASE("emptiness") {
  Grammar g = load_grammar("f = fail\na = 'a'\nb = 'b'");
  Analyzer an(g);
  CHECK(is_empty_lang(an.approx(body(g, "f"))));
  CHECK_FALSE(is_empty_lang(an.approx(body(g, "a"))));
  CHECK(is_empty_lang(intersect(an.approx(body(g, "a")), an.approx(body(g, "b")))));
  RegexApprox ext = extend_right(an.approx(body(g, "a")));
  CHECK(ext.accepts("abc"));
  CHECK_FALSE(ext.accepts("ba"));
}

TEST_CASE("overlap") {
  Grammar g = load_grammar("a = 'a'\nb = 'b'\nab = 'ab'\nneg = ~'a' .");
  Analyzer an(g);
  CHECK(an.overlap(body(g, "a"), body(g, "a")));
  CHECK_FALSE(an.overlap(body(g, "a"), body(g, "b")));
  CHECK(an.overlap(body(g, "ab"), body(g, "a")));
  CHECK(an.overlap(body(g, "neg"), body(g, "a")));
}

TEST_CASE("first items") {
  Grammar g = load_grammar("abc = 'abc'\nalt = 'a' | 'b'\neps = ()\nany = . 'x'");
  Analyzer an(g);
  FirstInfo f = an.first_items(body(g, "abc"));
  CHECK(f.first == CharClassSet::single('a'));
  CHECK_FALSE(f.nullable);
  f = an.first_items(body(g, "alt"));
  CHECK(f.first == CharClassSet::range('a', 'b'));
  f = an.first_items(body(g, "eps"));
  CHECK(f.first.matches_nothing());
  CHECK(f.nullable);
  f = an.first_items(body(g, "any"));
  CHECK(f.any);

  const FirstInfo& q = an.quick_first(body(g, "alt"));
  CHECK(q.may_start_with(Item::scalar('a')));
  CHECK(q.may_start_with(Item::scalar('b')));
  CHECK_FALSE(q.may_start_with(Item::scalar('c')));
}

TEST_CASE("minimal sizes of the shipped examples") {
  Grammar g = load_grammar(rt::grammar_file("sizes.peg"));
  Analyzer an(g);
  SizeBounds choice = an.size_bounds(body(g, "choice"));
  CHECK(choice.min == 2);
  CHECK(choice.max == 3);
  SizeBounds foobar = an.size_bounds(body(g, "foobar"));
  CHECK(foobar.min == 6);
  CHECK(foobar.max == 6);
}

TEST_CASE("size bounds of basic forms") {
  Grammar g = load_grammar("e = ()\nstar = 'a'*\nrec = nested('(', rec?, ')')\nla = &'abc' ~'x'\nf = fail");
  Analyzer an(g);
  CHECK(an.size_bounds(body(g, "e")) == SizeBounds{0, 0});
  SizeBounds star = an.size_bounds(body(g, "star"));
  CHECK(star.min == 0);
  CHECK(star.max_infinite());
  SizeBounds rec = an.size_bounds(body(g, "rec"));
  CHECK(rec.min == 2);
  CHECK(rec.max_infinite());
  CHECK(an.size_bounds(body(g, "la")) == SizeBounds{0, 0});
  CHECK(an.size_bounds(body(g, "f")).min_infinite());
}

TEST_CASE("nested progress warnings") {
  Grammar ok = load_grammar("s = nested('(', (), ')')");
  CHECK(Analyzer(ok).check_nested_progress().empty());
  Grammar bad = load_grammar("s = nested((), (), ())");
  CHECK(Analyzer(bad).check_nested_progress().size() == 1);
  Grammar python = load_grammar("block = nested(&' ', <a-z>*, &'\\n')");
  CHECK(Analyzer(python).check_nested_progress().size() == 1);
}

TEST_CASE("analysis report") {
  Grammar g = load_grammar(rt::grammar_file("sizes.peg") + "dead = fail\ndet = 'a' x | 'b' y\nx = 'x'\ny = 'y'\n"
                           "amb = 'a' x | 'a' y\novl = 'a' | 'ab'\n");
  AnalysisReport r = analyze(g);
  auto rule = [&](const std::string& name) {
    for (const RuleReport& rr : r.rules)
      if (rr.name == name) return rr;
    FAIL("missing rule " << name);
    return RuleReport{};
  };
  CHECK(rule("choice").bounds.min == 2);
  CHECK(rule("foobar").bounds.min == 6);
  CHECK(rule("dead").empty_language);
  CHECK_FALSE(rule("foobar").empty_language);
  bool det = false, amb = false, ovl = false;
  for (const ChoiceSite& c : r.choices) {
    if (c.rule == "det") det = c.deterministic && c.disjoint;
    if (c.rule == "amb") amb = !c.deterministic && c.disjoint;
    if (c.rule == "ovl") ovl = !c.deterministic && !c.disjoint;
  }
  CHECK(det);
  CHECK(amb);
  CHECK(ovl);
  std::string text = format_report(r);
  CHECK(text.find("foobar") != std::string::npos);
}

TEST_CASE("property: approximations contain every consumed prefix") {
  gen::Rng rng(47);
  std::size_t accepted = 0;
  for (int i = 0; accepted < 200 && i < 5000; ++i) {
    gen::GenGrammar gg = gen::random_checkable_grammar(rng);
    Grammar g = gg.build();
    Analyzer an(g);
    RegexApprox ra = an.approx(g.body(g.start()));
    for (int k = 0; k < 5 && accepted < 200; ++k) {
      std::string in = gen::random_string(rng, "abc", 6);
      auto r = parse(g, in);
      if (!r.success) continue;
      ++accepted;
      CAPTURE(gg.text());
      CAPTURE(in);
      CHECK(ra.accepts(in.substr(0, r.end)));
    }
  }
  CHECK(accepted == 200);
}

TEST_CASE("property: size bounds enclose every match length") {
  gen::Rng rng(53);
  const auto inputs = gen::all_strings("abc", 6);
  for (int i = 0; i < 40; ++i) {
    gen::GenGrammar gg = gen::random_checkable_grammar(rng);
    Grammar g = gg.build();
    Analyzer an(g);
    SizeBounds b = an.size_bounds(g.body(g.start()));
    CHECK(b.min <= b.max);
    CAPTURE(gg.text());
    for (const std::string& in : inputs) {
      auto o = oracle_parse(g, in);
      if (!o.success) continue;
      CAPTURE(in);
      CHECK(b.min <= o.end);
      if (!b.max_infinite()) CHECK(o.end <= b.max);
    }
  }
}

TEST_CASE("property: disjoint alternatives can be swapped") {
  std::mt19937_64 rng(59);
  const auto inputs = gen::all_strings("abc", 6);
  int swapped = 0;
  for (int i = 0; swapped < 40 && i < 2000; ++i) {
    std::string e1 = random_expr(rng, 2), e2 = random_expr(rng, 2), tail = random_expr(rng, 1);
    Grammar parts = load_grammar("x1 = " + e1 + "\nx2 = " + e2);
    Analyzer an(parts);
    if (an.overlap(body(parts, "x1"), body(parts, "x2"))) continue;
    ++swapped;
    CAPTURE(e1);
    CAPTURE(e2);
    Grammar g = load_grammar("ab = (" + e1 + " | " + e2 + ") " + tail + "\nba = (" + e2 + " | " + e1 + ") " + tail);
    for (const std::string& in : inputs) {
      auto r1 = parse(g, in, "ab");
      auto r2 = parse(g, in, "ba");
      CAPTURE(in);
      REQUIRE(r1.success == r2.success);
      REQUIRE(r1.end == r2.end);
    }
  }
  CHECK(swapped == 40);
}
