#include <benchmark/benchmark.h>

#include "common.hpp"
#include "regreg/dsl.hpp"
#include "regreg/dynbuf.hpp"
#include "regreg/generate.hpp"

using namespace regreg;

namespace {

void BM_BatchParse(benchmark::State& state) {
  Grammar g = load_grammar(grammar_text("json.peg"));
  gen::Rng rng(2);
  std::vector<Item> in = items_from_utf8(gen::random_json(rng, static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(parse(g, in).end);
}
BENCHMARK(BM_BatchParse)->Arg(10 << 10)->Arg(100 << 10);

// Alternating insert/delete of one character followed by a reparse.
void BM_EditAndReparse(benchmark::State& state) {
  Grammar g = load_grammar(grammar_text("json.peg"));
  gen::Rng rng(2);
  EditBuffer buf(g, gen::random_json(rng, static_cast<std::size_t>(state.range(0))));
  buf.reparse();
  std::size_t pos = buf.size() / 2;
  while (buf.chr(pos) != Item::scalar(',')) ++pos;
  ++pos;
  bool inserted = false;
  std::size_t misses = 0;
  for (auto _ : state) {
    if (inserted) {
      buf.del(pos);
    } else {
      buf.ins(pos, U' ');
    }
    inserted = !inserted;
    ReparseResult r = buf.reparse();
    misses = r.stats.misses;
    benchmark::DoNotOptimize(r.outcome.end);
  }
  state.counters["misses"] = static_cast<double>(misses);
  state.counters["entries"] = static_cast<double>(buf.memo_entries());
}
BENCHMARK(BM_EditAndReparse)->Arg(10 << 10)->Arg(100 << 10);

void BM_RandomEdits(benchmark::State& state) {
  Grammar g = load_grammar(grammar_text("json.peg"));
  gen::Rng rng(3);
  std::string text = gen::random_json(rng, 10 << 10);
  std::size_t n = items_from_utf8(text).size();
  std::vector<gen::EditOp> ops = gen::random_edit_script(rng, n, 1000);
  for (auto _ : state) {
    EditBuffer buf(g, text);
    for (const gen::EditOp& op : ops) {
      switch (op.kind) {
        case gen::EditOp::Kind::Ins: buf.ins(op.pos, op.ch); break;
        case gen::EditOp::Kind::Del: buf.del(op.pos); break;
        case gen::EditOp::Kind::Parse: benchmark::DoNotOptimize(buf.reparse().outcome.end); break;
      }
    }
  }
}
BENCHMARK(BM_RandomEdits)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
