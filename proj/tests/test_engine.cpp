#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <limits>
#include <random>

#include "regreg/generate.hpp"
#include "support.hpp"

using namespace regreg;

namespace {

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string repeat(std::string_view unit, std::size_t times) {
  std::string out;
  for (std::size_t i = 0; i < times; ++i) out += unit;
  return out;
}

std::shared_ptr<ActionRegistry> registry_with_parity() {
  auto reg = std::make_shared<ActionRegistry>(*ActionRegistry::standard());
  reg->add({"odd", ActionKind::Predicate, [](ActionContext& ctx) { return ctx.position() % 2 == 1; }, false, false});
  return reg;
}

// Non-nullable iteration bodies over {a,b}.
std::string random_body(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  std::string lit = pick(2) ? "'a'" : "'b'";
  if (depth == 0) return lit;
  switch (pick(4)) {
    case 0: return lit;
    case 1: return "(" + lit + " " + random_body(rng, depth - 1) + ")";
    case 2: return "(" + random_body(rng, depth - 1) + " | " + random_body(rng, depth - 1) + ")";
    default: return "(" + lit + " " + (pick(2) ? "'a'?" : "'b'*") + ")";
  }
}

constexpr const char* kDeterministic = "s = (~. break | item ';')*\nitem = 'a' ('b' | 'c')";

}  // namespace

TEST_CASE("calculator") {
  Grammar g = load_grammar(rt::grammar_file("calculator.peg"));
  auto r = parse(g, "2-4+2*2--2");
  REQUIRE(rt::whole(r, 10));
  CHECK(r.value.as_int() == 4);
  // The raw grammar still has its left recursion, so the oracle needs a cap
  // and an end anchor to pick the whole-input derivation.
  Grammar raw = rt::raw_grammar(rt::grammar_file("calculator.peg") + "\ntop = expr:x ~. {@x}\n");
  auto o = oracle_parse(raw, "2-4+2*2--2", "top", {14, false, 0});
  REQUIRE(rt::whole(o, 10));
  CHECK(o.value.as_int() == 4);
}

TEST_CASE("empty start on empty input") {
  Grammar g = load_grammar("s = ()");
  auto r = parse(g, "");
  CHECK(r.success);
  CHECK(r.end == 0);
}

TEST_CASE("iteration backtracks to let the continuation match") {
  Grammar g = load_grammar("s = ' '* ' foo'");
  CHECK(rt::whole(parse(g, " foo"), 4));
  CHECK(rt::whole(oracle_parse(g, " foo"), 4));
  CHECK(rt::whole(parse(g, "    foo"), 7));
}

TEST_CASE("stop outside an iteration is an engine bug") {
  auto pool = std::make_shared<ExprPool>();
  Grammar g(pool);
  g.add_rule("s", pool->mk_seq(pool->literal("a"), pool->mk_stop(pool->fresh_stop_id())));
  g.finalize();
  CHECK(rt::error_of([&] { parse(g, "a"); }) == ErrorCode::EngineBug);
}

TEST_CASE("nested expressions are evaluated once per position") {
  Grammar g = load_grammar("s = n 'x' | n 'y'\nn = nested('(', 'a', ')')");
  auto r = parse(g, "(a)y");
  REQUIRE(rt::whole(r, 4));
  CHECK(r.stats["nested_misses"] == 1);
  CHECK(r.stats["nested_hits"] == 1);
  CHECK(r.stats["memo_hits"] == 1);
}

TEST_CASE("lookahead consumes nothing and reverts bindings") {
  Grammar neg = load_grammar("s = ~('b':x 'c') . {@x}");
  auto r = parse(neg, "b");
  REQUIRE(rt::whole(r, 1));
  CHECK(r.value.is_nil());
  CHECK(oracle_parse(neg, "b").value.is_nil());

  Grammar pos = load_grammar("s = &('b':x) . {@x}");
  auto p = parse(pos, "b");
  REQUIRE(rt::whole(p, 1));
  CHECK(p.value.is_nil());
  CHECK(oracle_parse(pos, "b").value == p.value);

  Grammar plain = load_grammar("s = ~'a'");
  auto q = parse(plain, "b");
  CHECK(q.success);
  CHECK(q.end == 0);
}

TEST_CASE("memo keys forget actions and bindings") {
  Grammar with = load_grammar("s = t:x ',' s {@id} | t:y ';'\nt = <a-z>+:z {@text}");
  Grammar without = load_grammar("s = t ',' s | t ';'\nt = <a-z>+");
  const auto in = items_from_utf8("ab,cd,e;");
  Session s1(with, in), s2(without, in);
  CHECK(rt::whole(s1.parse(), in.size()));
  CHECK(rt::whole(s2.parse(), in.size()));
  auto k1 = sorted(s1.memo_keys());
  CHECK_FALSE(k1.empty());
  CHECK(k1 == sorted(s2.memo_keys()));
}

TEST_CASE("predicate rules are never memoized") {
  Grammar g = load_grammar("s = 'b'? p 'x' | 'b'? p 'y'\np = 'a' {@odd}", registry_with_parity());
  Session s(g, items_from_utf8("ay"));
  auto r = s.parse();
  CHECK(rt::whole(r, 2));
  for (const std::string& k : s.memo_keys()) {
    CAPTURE(k);
    CHECK(k.find("RuleRef(p) |") == std::string::npos);
    CHECK(k.find("Act(odd)") == std::string::npos);
  }
  CHECK_FALSE(parse(g, "bay").success);
}

TEST_CASE("a second parse in one session does no more work") {
  Grammar g = load_grammar(rt::grammar_file("json.peg"));
  gen::Rng rng(1);
  std::string text = gen::random_json(rng, 2000);
  Session s(g, items_from_utf8(text));
  auto first = s.parse();
  auto second = s.parse();
  REQUIRE(rt::whole(first, text.size()));
  CHECK(second.value == first.value);
  CHECK(second.stats["invocations"] <= first.stats["invocations"]);
}

TEST_CASE("eviction keeps memory constant on a deterministic grammar") {
  Grammar g = load_grammar(kDeterministic);
  std::int64_t peak[2];
  for (int i = 0; i < 2; ++i) {
    std::size_t n = i == 0 ? 10000 : 100000;
    std::string in = repeat("ab;ac;", n / 6);
    auto r = parse(g, in);
    REQUIRE(rt::whole(r, in.size()));
    CHECK(r.stats["evicted"] > 0);
    peak[i] = r.stats["peak_memo_entries"];
  }
  CHECK(peak[0] == peak[1]);

  EngineOptions off;
  off.evict = false;
  std::string in = repeat("ab;ac;", 10000 / 6);
  CHECK(parse(g, in, {}, off).stats["peak_memo_entries"] > peak[0]);
}

TEST_CASE("shared iteration prefixes keep their entries") {
  Grammar g = load_grammar("s = e* 'x' | e* 'y'\ne = 'a'");
  auto r = parse(g, "aaaaaaaaay");
  REQUIRE(rt::whole(r, 10));
  CHECK(r.stats["memo_stores"] > 0);
  CHECK(r.stats["evicted"] == 0);
  CHECK(r.stats["watermark"] == 0);
}

TEST_CASE("contextual returns turn eviction off") {
  Grammar g = load_grammar("s = ('a' {@log_a})* ~.");
  auto r = parse(g, "aaa");
  REQUIRE(r.success);
  CHECK(r.stats["eviction_enabled"] == 0);
  CHECK(r.log() == std::vector<std::string>{"a@1", "a@2", "a@3"});
}

TEST_CASE("memo policy parsing") {
  EngineOptions o;
  o.set_memo("threshold:12");
  CHECK(o.memo == MemoPolicy::Threshold);
  CHECK(o.threshold == 12);
  o.set_memo("never");
  CHECK(o.memo == MemoPolicy::Never);
  o.set_memo("always");
  CHECK(o.memo == MemoPolicy::Always);
  CHECK(rt::error_of([&] { o.set_memo("sometimes"); }) == ErrorCode::InvalidArgument);
  CHECK(rt::error_of([&] { o.set_memo("threshold:x"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("threshold policy limits") {
  Grammar g = load_grammar(rt::grammar_file("json.peg"));
  gen::Rng rng(2);
  std::string text = gen::random_json(rng, 10 * 1024);
  EngineOptions always, huge, one, t512;
  huge.set_memo("threshold:" + std::to_string(std::numeric_limits<std::size_t>::max()));
  one.set_memo("threshold:1");
  t512.set_memo("threshold:512");
  auto ra = parse(g, text, {}, always);
  auto rh = parse(g, text, {}, huge);
  auto r1 = parse(g, text, {}, one);
  auto r512 = parse(g, text, {}, t512);
  REQUIRE(rt::whole(ra, text.size()));
  for (const auto* r : {&rh, &r1, &r512}) {
    CHECK(r->success == ra.success);
    CHECK(r->end == ra.end);
    CHECK(r->value == ra.value);
  }
  CHECK(rh.stats["peak_memo_entries"] == 0);
  CHECK(rh.stats["memo_stores"] == 0);
  CHECK(r1.stats["memo_stores"] > 0);
  CHECK(r512.stats["peak_memo_entries"] < ra.stats["peak_memo_entries"]);
}

TEST_CASE("iteration without progress is an error") {
  Grammar g = load_grammar("s = ('a'?)*");
  CHECK(rt::error_of([&] { parse(g, "b"); }) == ErrorCode::IterationNoProgress);
  CHECK(rt::whole(parse(load_grammar("s = ('a' 'a'?)*"), "aaa"), 3));
}

TEST_CASE("invocation budget") {
  Grammar g = load_grammar(rt::grammar_file("pathological.peg"));
  EngineOptions o;
  o.max_invocations = 100;
  CHECK(rt::error_of([&] { parse(g, std::string(1000, 'a'), {}, o); }) == ErrorCode::BudgetExceeded);
}

TEST_CASE("trivial iteration costs n plus a constant") {
  Grammar g = load_grammar("s = 'a'*");
  std::int64_t base = -1;
  for (std::size_t n : {0, 1, 10, 100, 1000, 10000}) {
    auto r = parse(g, std::string(n, 'a'));
    REQUIRE(rt::whole(r, n));
    std::int64_t extra = r.stats["invocations"] - static_cast<std::int64_t>(n);
    if (base < 0) base = extra;
    CHECK(extra == base);
  }
}

TEST_CASE("pathological grammar is linear with memoization") {
  Grammar g = load_grammar(rt::grammar_file("pathological.peg"));
  std::vector<std::int64_t> counts;
  std::vector<std::size_t> keys, conts;
  for (std::size_t n : {1000, 2000, 4000}) {
    std::vector<Item> in = items_from_utf8(std::string(n, 'a'));
    Session s(g, in);
    auto r = s.parse();
    CHECK_FALSE(r.success);
    counts.push_back(r.stats["invocations"]);
    keys.push_back(s.memo_keys().size());
    conts.push_back(s.continuation_count());
  }
  for (std::size_t i = 1; i < counts.size(); ++i) {
    double ratio = static_cast<double>(counts[i]) / static_cast<double>(counts[i - 1]);
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.5);
    CHECK(conts[i] == conts[0]);
    CHECK(static_cast<double>(keys[i]) <= 2.2 * static_cast<double>(keys[i - 1]));
  }

  EngineOptions never;
  never.memo = MemoPolicy::Never;
  auto c64 = parse(g, std::string(64, 'a'), {}, never).stats["invocations"];
  auto c128 = parse(g, std::string(128, 'a'), {}, never).stats["invocations"];
  CHECK(static_cast<double>(c128) / static_cast<double>(c64) >= 8.0);
}

TEST_CASE("minimal-size pruning does not change outcomes") {
  gen::Rng rng(17);
  EngineOptions prune;
  prune.prune = true;
  std::int64_t pruned = 0;
  for (int i = 0; i < 40; ++i) {
    Grammar g = gen::random_checkable_grammar(rng).build();
    for (int k = 0; k < 40; ++k) {
      std::string in = gen::random_string(rng, "abc", 8);
      auto a = parse(g, in);
      auto b = parse(g, in, {}, prune);
      REQUIRE(a.success == b.success);
      REQUIRE(a.end == b.end);
      REQUIRE(a.value == b.value);
      pruned += b.stats["depth_pruned"];
    }
  }
  Grammar fixed = load_grammar("s = 'abcdef' | 'a'");
  auto r = parse(fixed, "ab", {}, prune);
  CHECK(r.end == 1);
  CHECK(r.stats["depth_pruned"] > 0);
}

TEST_CASE("fault injection is visible to the oracle") {
  Grammar g = load_grammar("s = 'a' 'b'");
  EngineOptions bad;
  bad.inject_fault = true;
  CHECK(rt::whole(oracle_parse(g, "ab"), 2));
  CHECK_FALSE(rt::whole(parse(g, "ab", {}, bad), 2));
}

TEST_CASE("property: policies and eviction leave outcomes unchanged") {
  gen::Rng rng(29);
  std::vector<EngineOptions> configs;
  for (const char* m : {"always", "never", "threshold:512"}) {
    for (bool evict : {true, false}) {
      EngineOptions o;
      o.set_memo(m);
      o.evict = evict;
      configs.push_back(o);
    }
  }
  for (int i = 0; i < 60; ++i) {
    Grammar g = gen::random_checkable_grammar(rng).build();
    std::string in = gen::random_string(rng, "abc", 8);
    CAPTURE(in);
    auto ref = parse(g, in, {}, configs[0]);
    for (const EngineOptions& o : configs) {
      auto r = parse(g, in, {}, o);
      REQUIRE(r.success == ref.success);
      REQUIRE(r.end == ref.end);
      REQUIRE(r.value == ref.value);
    }
  }
}

TEST_CASE("property: iteration and right recursion accept the same strings") {
  std::mt19937_64 rng(31);
  const auto inputs = gen::all_strings("ab", 6);
  for (int i = 0; i < 100; ++i) {
    std::string e = random_body(rng, 3);
    CAPTURE(e);
    Grammar g = load_grammar("it = (" + e + ")* ~.\nrec = r ~.\nr = " + e + " r | ()");
    for (const std::string& in : inputs) {
      CAPTURE(in);
      REQUIRE(parse(g, in, "it").success == parse(g, in, "rec").success);
    }
  }
}

TEST_CASE("property: engine and oracle agree, including values") {
  gen::Rng rng(37);
  const auto inputs = gen::all_strings("abc", 5);
  for (int i = 0; i < 40; ++i) {
    gen::GenGrammar gg = gen::random_checkable_grammar(rng);
    Grammar g = gg.build();
    CAPTURE(gg.text());
    for (const std::string& in : inputs) {
      auto o = oracle_parse(g, in);
      if (o.cap_hit) continue;
      auto r = parse(g, in);
      CAPTURE(in);
      REQUIRE(r.success == o.success);
      REQUIRE(r.end == o.end);
      REQUIRE(r.value == o.value);
    }
  }
}

TEST_CASE("property: action logs match the oracle's surviving derivation") {
  gen::Rng rng(41);
  gen::GenOptions opts;
  opts.actions = true;
  opts.action_rate = 0.35;
  const auto inputs = gen::all_strings("abc", 5);
  std::size_t nonempty = 0;
  for (int i = 0; i < 40; ++i) {
    gen::GenGrammar gg = gen::random_checkable_grammar(rng, opts);
    Grammar g = gg.build();
    CAPTURE(gg.text());
    for (const std::string& in : inputs) {
      auto o = oracle_parse(g, in);
      if (o.cap_hit) continue;
      auto r = parse(g, in);
      CAPTURE(in);
      REQUIRE(r.success == o.success);
      REQUIRE(r.log() == o.log());
      nonempty += !r.log().empty();
    }
  }
  CHECK(nonempty > 0);
}

TEST_CASE("failed alternatives and lookaheads leave no log entries") {
  Grammar g = load_grammar("s = 'a' {@log_x} 'b' | 'a' {@log_y} 'c'\nt = ~('a' {@log_z} 'q') &('a' {@log_w}) 'a'");
  auto r = parse(g, "ac");
  CHECK(r.log() == std::vector<std::string>{"y@1"});
  auto t = parse(g, "a", "t");
  CHECK(rt::whole(t, 1));
  CHECK(t.log().empty());
}
