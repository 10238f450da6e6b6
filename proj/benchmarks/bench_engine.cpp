#include <benchmark/benchmark.h>

#include "common.hpp"
#include "regreg/dsl.hpp"
#include "regreg/engine.hpp"
#include "regreg/generate.hpp"

using namespace regreg;

namespace {

void BM_Pathological(benchmark::State& state) {
  Grammar g = load_grammar(grammar_text("pathological.peg"));
  std::vector<Item> in = items_from_utf8(std::string(static_cast<std::size_t>(state.range(0)), 'a'));
  std::int64_t invocations = 0;
  for (auto _ : state) {
    ParseOutcome o = parse(g, in);
    invocations = o.stats["invocations"];
    benchmark::DoNotOptimize(o.end);
  }
  state.counters["invocations"] = static_cast<double>(invocations);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Pathological)->RangeMultiplier(2)->Range(1000, 16000)->Complexity(benchmark::oN);

void BM_PathologicalNoMemo(benchmark::State& state) {
  Grammar g = load_grammar(grammar_text("pathological.peg"));
  std::vector<Item> in = items_from_utf8(std::string(static_cast<std::size_t>(state.range(0)), 'a'));
  EngineOptions o;
  o.memo = MemoPolicy::Never;
  for (auto _ : state) benchmark::DoNotOptimize(parse(g, in, {}, o).end);
}
BENCHMARK(BM_PathologicalNoMemo)->RangeMultiplier(2)->Range(16, 128);

void BM_Json(benchmark::State& state) {
  Grammar g = load_grammar(grammar_text("json.peg"));
  gen::Rng rng(1);
  std::vector<Item> in = items_from_utf8(gen::random_json(rng, static_cast<std::size_t>(state.range(0))));
  EngineOptions o;
  o.memo = static_cast<MemoPolicy>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(parse(g, in, {}, o).end);
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Json)
    ->ArgsProduct({{10 << 10, 100 << 10},
                   {static_cast<int>(MemoPolicy::Always), static_cast<int>(MemoPolicy::Never),
                    static_cast<int>(MemoPolicy::Threshold)}})
    ->ArgNames({"bytes", "policy"});

void BM_Calculator(benchmark::State& state) {
  Grammar g = load_grammar(grammar_text("calculator.peg"));
  std::string expr = "1";
  for (int i = 0; i < state.range(0); ++i) expr += i % 3 ? "*2-1" : "+(3-4)";
  std::vector<Item> in = items_from_utf8(expr);
  for (auto _ : state) benchmark::DoNotOptimize(parse(g, in).value);
}
BENCHMARK(BM_Calculator)->Arg(100)->Arg(1000);

void BM_Eviction(benchmark::State& state) {
  Grammar g = load_grammar("s = (~. break | item ';')*\nitem = 'a' ('b' | 'c')");
  std::string text;
  while (text.size() < 100000) text += "ab;ac;";
  std::vector<Item> in = items_from_utf8(text);
  EngineOptions o;
  o.evict = state.range(0) != 0;
  std::int64_t peak = 0;
  for (auto _ : state) {
    ParseOutcome r = parse(g, in, {}, o);
    peak = r.stats["peak_memo_entries"];
    benchmark::DoNotOptimize(r.end);
  }
  state.counters["peak_memo"] = static_cast<double>(peak);
}
BENCHMARK(BM_Eviction)->Arg(0)->Arg(1)->ArgName("evict");

}  // namespace

BENCHMARK_MAIN();
