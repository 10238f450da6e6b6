#include <doctest.h>

#include <algorithm>

#include "regreg/dynbuf.hpp"
#include "regreg/generate.hpp"
#include "support.hpp"

using namespace regreg;

namespace {

const MemoInfo* entry_at(const std::vector<MemoInfo>& snap, std::size_t index) {
  for (const MemoInfo& m : snap)
    if (m.index == index) return &m;
  return nullptr;
}

bool agrees_with_batch(const Grammar& g, EditBuffer& buf, const ReparseResult& r) {
  ParseOutcome batch = parse(g, buf.items());
  return batch.success == r.outcome.success &&
         (!batch.success || (batch.end == r.outcome.end && batch.value == r.outcome.value));
}

}  // namespace

TEST_CASE("user interface basics") {
  Grammar g = load_grammar("s = 'a'*");
  EditBuffer buf(g, "abc");
  CHECK(buf.size() == 3);
  CHECK(buf.chr(1) == Item::scalar('b'));
  buf.ins(0, U'x');
  buf.ins(4, U'y');
  CHECK(buf.text() == "xabcy");
  buf.del(2);
  CHECK(buf.text() == "xacy");
  buf.ins(2, U'é');
  CHECK(buf.text() == "xaécy");
  CHECK(buf.size() == 5);
  CHECK(buf.check_invariants().empty());
}

TEST_CASE("out of range positions") {
  Grammar g = load_grammar("s = 'a'*");
  EditBuffer buf(g, "ab");
  CHECK(rt::error_of([&] { buf.chr(2); }) == ErrorCode::IndexOutOfRange);
  CHECK(rt::error_of([&] { buf.del(2); }) == ErrorCode::IndexOutOfRange);
  CHECK(rt::error_of([&] { buf.ins(3, U'a'); }) == ErrorCode::IndexOutOfRange);
  CHECK(rt::error_of([&] { buf.rindex(3); }) == ErrorCode::IndexOutOfRange);
  CHECK_FALSE(rt::error_of([&] { buf.ins(2, U'a'); }));
}

TEST_CASE("parse and reparse agree with batch parsing") {
  Grammar g = load_grammar(rt::grammar_file("json.peg"));
  EditBuffer buf(g, "[1, {\"a\": \"b\"}, [true]]");
  ReparseResult r = buf.reparse();
  CHECK(rt::whole(r.outcome, buf.size()));
  CHECK(agrees_with_batch(g, buf, r));
  for (int i = 0; i < 3; ++i) buf.del(1);
  r = buf.reparse();
  CHECK(rt::whole(r.outcome, buf.size()));
  CHECK(agrees_with_batch(g, buf, r));
  buf.ins(0, U'x');
  r = buf.reparse();
  CHECK_FALSE(r.outcome.success);
  CHECK(agrees_with_batch(g, buf, r));
}

TEST_CASE("zero-edit reparse recomputes nothing") {
  gen::Rng rng(71);
  Grammar g = load_grammar(rt::grammar_file("json.peg"));
  EditBuffer buf(g, gen::random_json(rng, 3000));
  ReparseResult first = buf.reparse();
  REQUIRE(first.outcome.success);
  CHECK(first.stats.misses > 0);
  ReparseResult again = buf.reparse();
  CHECK(again.stats.misses == 0);
  CHECK(again.stats.hits > 0);
  CHECK(again.outcome.value == first.outcome.value);
}

TEST_CASE("read extent covers lookahead past the match") {
  Grammar g = load_grammar("s = nested('<', 'a', '>' &'b') 'b'");
  EditBuffer buf(g, "<a>b");
  REQUIRE(rt::whole(buf.reparse().outcome, 4));
  auto snap = buf.memo_snapshot();
  REQUIRE(snap.size() == 1);
  CHECK(snap[0].index == 0);
  CHECK(snap[0].success);
  CHECK(snap[0].advance == 3);
  CHECK(snap[0].read_extent == 4);

  Grammar g2 = load_grammar("s = nested('a', (), &'b') .");
  EditBuffer b2(g2, "ab");
  REQUIRE(rt::whole(b2.reparse().outcome, 2));
  snap = b2.memo_snapshot();
  REQUIRE(snap.size() == 1);
  CHECK(snap[0].advance == 1);
  CHECK(snap[0].read_extent == 2);
  for (const MemoInfo& m : snap) CHECK(m.advance <= m.read_extent);
}

TEST_CASE("edits invalidate only entries whose read interval they touch") {
  Grammar g = load_grammar("s = nested('(', 'x'*, ')') 'y'*");
  SUBCASE("edit to the right of the interval") {
    EditBuffer buf(g, "(xx)yyy");
    REQUIRE(buf.reparse().outcome.success);
    const MemoInfo* e = entry_at(buf.memo_snapshot(), 0);
    REQUIRE(e);
    std::size_t extent = e->read_extent;
    REQUIRE(extent < 6);
    buf.ins(6, U'y');
    ReparseResult r = buf.reparse();
    CHECK(rt::whole(r.outcome, 8));
    CHECK(r.stats.misses == 0);
    CHECK(r.stats.hits == 1);
  }
  SUBCASE("edit inside the interval") {
    EditBuffer buf(g, "(xx)yyy");
    REQUIRE(buf.reparse().outcome.success);
    buf.ins(1, U'x');
    ReparseResult r = buf.reparse();
    CHECK(rt::whole(r.outcome, 8));
    CHECK(r.stats.misses == 1);
    CHECK(r.stats.stale == 1);
  }
  SUBCASE("deletion inside the interval") {
    EditBuffer buf(g, "(xx)yyy");
    REQUIRE(buf.reparse().outcome.success);
    buf.del(2);
    ReparseResult r = buf.reparse();
    CHECK(rt::whole(r.outcome, 6));
    CHECK(r.stats.misses == 1);
  }
  SUBCASE("insertion before the entry shifts it") {
    EditBuffer buf(g, "(xx)yyy");
    REQUIRE(buf.reparse().outcome.success);
    buf.ins(0, U'(');
    buf.del(0);
    ReparseResult r = buf.reparse();
    CHECK(rt::whole(r.outcome, 7));
    CHECK(agrees_with_batch(g, buf, r));
  }
}

TEST_CASE("markers are stable across edits") {
  Grammar g = load_grammar("s = .*");
  EditBuffer buf(g, "abcdef");
  for (std::size_t k = 0; k <= buf.size(); ++k) CHECK(buf.index(buf.rindex(k)) == k);
  Marker d = buf.rindex(3);
  CHECK(buf.char_at(d) == Item::scalar('d'));
  buf.ins(0, U'z');
  CHECK(buf.index(d) == 4);
  CHECK(buf.char_at(d) == Item::scalar('d'));
  CHECK(buf.char_at(buf.next(d)) == Item::scalar('e'));
  Marker end = buf.rindex(buf.size());
  CHECK(buf.at_end(end));
  CHECK(buf.next(end) == end);
  buf.del(4);
  CHECK(buf.index(d) == 4);
  CHECK(buf.char_at(buf.next(d)) == Item::scalar('e'));
  CHECK(rt::error_of([&] { buf.char_at(d); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("contextual arguments are rejected") {
  auto reg = std::make_shared<ActionRegistry>(*ActionRegistry::standard());
  ActionSpec spec;
  spec.name = "setx";
  spec.fn = [](ActionContext& c) {
    c.set_ctx_arg("x", Value::number(1));
    return true;
  };
  spec.uses_ctx_args = true;
  reg->add(spec);
  Grammar g = load_grammar("s = 'a' {@setx}", reg);
  CHECK(rt::error_of([&] { EditBuffer buf(g, "a"); }) == ErrorCode::ContextualArgsUnsupported);
}

TEST_CASE("verification mode recomputes hits") {
  gen::Rng rng(73);
  Grammar g = load_grammar(rt::grammar_file("json.peg"));
  EditBuffer buf(g, gen::random_json(rng, 800));
  buf.set_verify(true);
  REQUIRE(buf.reparse().outcome.success);
  buf.ins(buf.size(), U' ');
  ReparseResult r = buf.reparse();
  CHECK(r.outcome.success);
  CHECK(r.stats.hits > 0);
}

TEST_CASE("property: random edit scripts match batch parsing") {
  gen::Rng rng(79);
  Grammar g = load_grammar(rt::grammar_file("json.peg"));
  for (int s = 0; s < 20; ++s) {
    std::string text = gen::random_json(rng, 1500);
    EditBuffer buf(g, text);
    std::vector<char32_t> naive(items_from_utf8(text).size());
    for (std::size_t i = 0; i < naive.size(); ++i) naive[i] = items_from_utf8(text)[i].as_scalar();
    auto ops = gen::random_edit_script(rng, naive.size(), 150);
    std::size_t step = 0;
    for (const gen::EditOp& op : ops) {
      ++step;
      CAPTURE(s);
      CAPTURE(step);
      switch (op.kind) {
        case gen::EditOp::Kind::Ins:
          buf.ins(op.pos, op.ch);
          naive.insert(naive.begin() + static_cast<std::ptrdiff_t>(op.pos), op.ch);
          break;
        case gen::EditOp::Kind::Del:
          buf.del(op.pos);
          naive.erase(naive.begin() + static_cast<std::ptrdiff_t>(op.pos));
          break;
        case gen::EditOp::Kind::Parse: {
          ReparseResult r = buf.reparse();
          REQUIRE(agrees_with_batch(g, buf, r));
          break;
        }
      }
      REQUIRE(buf.size() == naive.size());
    }
    for (std::size_t i = 0; i < naive.size(); ++i) REQUIRE(buf.chr(i) == Item::scalar(naive[i]));
    for (std::size_t k = 0; k <= buf.size(); k += 7) REQUIRE(buf.index(buf.rindex(k)) == k);
    CHECK(buf.check_invariants().empty());
    CHECK(buf.tombstone_count() <= buf.run_count() - buf.tombstone_count());
  }
}

TEST_CASE("property: timestamps against a per-item array") {
  gen::Rng rng(83);
  Grammar g = load_grammar("s = .*");
  for (int s = 0; s < 40; ++s) {
    std::string text = gen::random_string(rng, "abc", 60) + "abc";
    EditBuffer buf(g, text);
    std::vector<std::uint64_t> stamp(buf.size(), 0);
    std::vector<Marker> marks;
    for (std::size_t i = 0; i < buf.size(); ++i) marks.push_back(buf.rindex(i));
    for (int step = 0; step < 60; ++step) {
      std::uint64_t pending = buf.epoch() + 1;
      std::size_t n = buf.size();
      if (rng() % 5 == 0) {
        buf.reparse();
      } else if (n > 2 && rng() % 2 == 0) {
        std::size_t p = rng() % n;
        // the untouched interval left of the edit keeps its timestamp
        std::size_t i = p ? rng() % p : 0;
        std::uint64_t before = p ? buf.timestamp_range(marks[i], marks[p - 1]) : 0;
        buf.del(p);
        stamp.erase(stamp.begin() + static_cast<std::ptrdiff_t>(p));
        marks.erase(marks.begin() + static_cast<std::ptrdiff_t>(p));
        if (p) CHECK(buf.timestamp_range(marks[i], marks[p - 1]) == before);
      } else {
        std::size_t p = rng() % (n + 1);
        std::size_t j = p < n ? p + rng() % (n - p) : n;
        std::uint64_t before = p < n ? buf.timestamp_range(marks[p], marks[j]) : 0;
        buf.ins(p, U'z');
        stamp.insert(stamp.begin() + static_cast<std::ptrdiff_t>(p), pending);
        marks.insert(marks.begin() + static_cast<std::ptrdiff_t>(p), buf.rindex(p));
        if (p < n) CHECK(buf.timestamp_range(marks[p + 1], marks[j + 1]) == before);
      }
      REQUIRE(marks.size() == buf.size());
      for (int q = 0; q < 5 && !marks.empty(); ++q) {
        std::size_t a = rng() % marks.size(), b = rng() % marks.size();
        if (a > b) std::swap(a, b);
        std::uint64_t want = *std::max_element(stamp.begin() + static_cast<std::ptrdiff_t>(a),
                                               stamp.begin() + static_cast<std::ptrdiff_t>(b) + 1);
        CHECK(buf.timestamp_range(marks[a], marks[b]) >= want);
        CHECK(buf.index(marks[a]) == a);
      }
    }
    CHECK(buf.check_invariants().empty());
  }
}
