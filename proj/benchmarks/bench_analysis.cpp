#include <benchmark/benchmark.h>

#include <random>

#include "common.hpp"
#include "regreg/analysis.hpp"
#include "regreg/dataflow.hpp"
#include "regreg/dsl.hpp"

using namespace regreg;

namespace {

void BM_AnalyzeJson(benchmark::State& state) {
  Grammar g = load_grammar(grammar_text("json.peg"));
  for (auto _ : state) benchmark::DoNotOptimize(analyze(g).rules.size());
}
BENCHMARK(BM_AnalyzeJson);

void BM_LoadGrammar(benchmark::State& state) {
  std::string text = grammar_text("calculator.peg");
  for (auto _ : state) benchmark::DoNotOptimize(load_grammar(text).rule_count());
}
BENCHMARK(BM_LoadGrammar);

// Chain of n keys where key i reads key i+1 and the last key reads the first:
// every value climbs to the cap, so the solver does O(n * height) work.
void BM_SolverCycle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  dataflow::Lattice<int> lat{0, [](const int& a, const int& b) { return std::max(a, b); },
                             [](const int& a, const int& b) { return a == b; }};
  std::size_t evals = 0;
  for (auto _ : state) {
    dataflow::Solver<int, int> s(lat, [n](const int& k, dataflow::Solver<int, int>& sv) {
      return std::min(64, sv.depends((k + 1) % n) + 1);
    });
    benchmark::DoNotOptimize(s.solve(0));
    evals = s.total_evaluations();
  }
  state.counters["evaluations"] = static_cast<double>(evals);
}
BENCHMARK(BM_SolverCycle)->Arg(16)->Arg(256)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
