#include "regreg/dynbuf.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>

#include "regreg/utf8.hpp"

namespace regreg {

struct DynRun;

struct DynEntry {
  bool ok = false;
  std::size_t advance = 0;
  std::size_t extent = 0;  // exclusive: reads covered [start, start + extent)
  std::uint64_t saved = 0;
  Value value;
  std::vector<Value> children;
  CtxReturns rets;
  std::size_t stored_index = 0;
};

struct DynCell {
  Item item;
  DynRun* run = nullptr;
  bool dead = false;
  bool eof = false;
  std::vector<std::pair<std::uint32_t, DynEntry>> memo;  // keyed by nested ExprId
};

struct DynRun {
  std::vector<DynCell*> cells;  // live items; empty for a tombstone
  std::vector<DynCell*> dead;   // deleted items that resolve to this run's start
  std::uint64_t ts = 0;
  std::uint64_t maxts = 0;
  std::size_t size = 0;  // live items in subtree
  std::size_t runs = 1;  // runs in subtree
  std::uint32_t prio = 0;
  DynRun* l = nullptr;
  DynRun* r = nullptr;
  DynRun* p = nullptr;

  bool tomb() const { return cells.empty(); }
};

namespace {

std::size_t sz(const DynRun* x) { return x ? x->size : 0; }
std::size_t rc(const DynRun* x) { return x ? x->runs : 0; }
std::uint64_t mt(const DynRun* x) { return x ? x->maxts : 0; }

}  // namespace

struct EditBuffer::Impl final : IncrementalHooks, InputSource {
  Impl(const Grammar& g, EngineOptions opts) : g(g), opts(opts), prng(0x5eed) {
    if (g.uses_ctx_args()) {
      throw Error(ErrorCode::ContextualArgsUnsupported,
                  "incremental parsing does not support grammars with contextual arguments");
    }
    DynCell* e = new_cell(Item::scalar(0));
    e->eof = true;
    eof_cell = e;
    DynRun* r = new_run({e}, 0);
    insert_after(nullptr, r);
  }

  const Grammar& g;
  EngineOptions opts;
  std::mt19937 prng;

  std::deque<DynCell> cells;
  std::deque<DynRun> run_store;
  std::vector<DynRun*> free_runs;
  DynRun* root = nullptr;
  DynCell* eof_cell = nullptr;
  std::uint64_t epoch_ = 0;
  std::size_t entries = 0;
  bool verify = false;

  struct Frame {
    std::uint32_t e;
    std::size_t pos;
    std::size_t last;
  };
  std::vector<Frame> stack;
  ReparseStats stats;
  std::unique_ptr<Session> session;

  mutable DynRun* cur = nullptr;
  mutable std::size_t cur_base = 0;

  // ---- allocation ---------------------------------------------------------

  DynCell* new_cell(Item it) {
    cells.emplace_back();
    cells.back().item = std::move(it);
    return &cells.back();
  }

  DynRun* new_run(std::vector<DynCell*> cs, std::uint64_t ts) {
    DynRun* r;
    if (!free_runs.empty()) {
      r = free_runs.back();
      free_runs.pop_back();
      *r = DynRun{};
    } else {
      run_store.emplace_back();
      r = &run_store.back();
    }
    r->cells = std::move(cs);
    for (DynCell* c : r->cells) c->run = r;
    r->ts = ts;
    r->prio = static_cast<std::uint32_t>(prng());
    return r;
  }

  // ---- treap ----------------------------------------------------------------

  static void pull(DynRun* x) {
    x->size = sz(x->l) + sz(x->r) + x->cells.size();
    x->runs = rc(x->l) + rc(x->r) + 1;
    x->maxts = std::max({x->ts, mt(x->l), mt(x->r)});
  }

  static void pull_path(DynRun* x) {
    for (; x; x = x->p) pull(x);
  }

  void rotate_up(DynRun* x) {
    DynRun* p = x->p;
    DynRun* gp = p->p;
    if (p->l == x) {
      p->l = x->r;
      if (x->r) x->r->p = p;
      x->r = p;
    } else {
      p->r = x->l;
      if (x->l) x->l->p = p;
      x->l = p;
    }
    p->p = x;
    x->p = gp;
    if (!gp) {
      root = x;
    } else if (gp->l == p) {
      gp->l = x;
    } else {
      gp->r = x;
    }
    pull(p);
    pull(x);
  }

  // Inserts x right after pos in sequence order; pos == nullptr means first.
  void insert_after(DynRun* pos, DynRun* x) {
    x->l = x->r = x->p = nullptr;
    pull(x);
    if (!root) {
      root = x;
      return;
    }
    DynRun* c;
    if (!pos) {
      c = root;
      while (c->l) c = c->l;
      c->l = x;
    } else if (!pos->r) {
      c = pos;
      c->r = x;
    } else {
      c = pos->r;
      while (c->l) c = c->l;
      c->l = x;
    }
    x->p = c;
    pull_path(c);
    while (x->p && x->p->prio < x->prio) rotate_up(x);
  }

  void erase(DynRun* x) {
    while (x->l || x->r) {
      DynRun* c = (!x->r || (x->l && x->l->prio > x->r->prio)) ? x->l : x->r;
      rotate_up(c);
    }
    DynRun* p = x->p;
    if (!p) {
      root = nullptr;
    } else if (p->l == x) {
      p->l = nullptr;
    } else {
      p->r = nullptr;
    }
    pull_path(p);
    x->cells.clear();
    x->dead.clear();
    free_runs.push_back(x);
  }

  static DynRun* next_run(DynRun* x) {
    if (x->r) {
      x = x->r;
      while (x->l) x = x->l;
      return x;
    }
    while (x->p && x->p->r == x) x = x->p;
    return x->p;
  }

  static DynRun* prev_run(DynRun* x) {
    if (x->l) {
      x = x->l;
      while (x->r) x = x->r;
      return x;
    }
    while (x->p && x->p->l == x) x = x->p;
    return x->p;
  }

  static std::size_t items_before(const DynRun* x) {
    std::size_t n = sz(x->l);
    for (; x->p; x = x->p) {
      if (x->p->r == x) n += sz(x->p->l) + x->p->cells.size();
    }
    return n;
  }

  static std::size_t rank(const DynRun* x) {
    std::size_t n = rc(x->l);
    for (; x->p; x = x->p) {
      if (x->p->r == x) n += rc(x->p->l) + 1;
    }
    return n;
  }

  // Live run holding item i (counting the end slot), and i's offset in it.
  DynRun* find_item(std::size_t i, std::size_t& off) const {
    DynRun* x = root;
    while (x) {
      std::size_t left = sz(x->l);
      if (i < left) {
        x = x->l;
      } else if (i < left + x->cells.size()) {
        off = i - left;
        return x;
      } else {
        i -= left + x->cells.size();
        x = x->r;
      }
    }
    throw Error(ErrorCode::IndexOutOfRange, "position past the end of the buffer");
  }

  static std::uint64_t range_max(const DynRun* x, std::size_t lo, std::size_t hi) {
    std::uint64_t m = 0;
    while (x && lo <= hi) {
      if (lo == 0 && hi + 1 >= x->runs) return std::max(m, x->maxts);
      std::size_t left = rc(x->l);
      if (hi < left) {
        x = x->l;
        continue;
      }
      if (lo > left) {
        lo -= left + 1;
        hi -= left + 1;
        x = x->r;
        continue;
      }
      m = std::max(m, x->ts);
      if (lo < left) m = std::max(m, range_max(x->l, lo, left - 1));
      if (hi > left) m = std::max(m, range_max(x->r, 0, hi - left - 1));
      return m;
    }
    return m;
  }

  // ---- positions ------------------------------------------------------------

  std::size_t total() const { return sz(root); }  // includes the end slot
  std::size_t user_size() const { return total() - 1; }

  DynCell* cell_at(std::size_t i) const {
    std::size_t off = 0;
    DynRun* r = find_item(i, off);
    return r->cells[off];
  }

  std::size_t index_of(const DynCell* c) const {
    std::size_t base = items_before(c->run);
    if (c->dead) return base;
    const auto& cs = c->run->cells;
    return base + static_cast<std::size_t>(std::find(cs.begin(), cs.end(), c) - cs.begin());
  }

  std::uint64_t ts_range(const DynCell* a, const DynCell* b) const {
    std::size_t ra = rank(a->run), rb = rank(b->run);
    if (ra > rb) std::swap(ra, rb);
    return range_max(root, ra, rb);
  }

  // ---- edits ----------------------------------------------------------------

  std::uint64_t pending() const { return epoch_ + 1; }

  void drop_memo(DynCell* c) {
    entries -= c->memo.size();
    c->memo.clear();
  }

  // Splits r so that its cells from `off` on form a new run placed after it.
  DynRun* split(DynRun* r, std::size_t off) {
    std::vector<DynCell*> tail(r->cells.begin() + static_cast<std::ptrdiff_t>(off), r->cells.end());
    r->cells.resize(off);
    pull_path(r);
    DynRun* r2 = new_run(std::move(tail), r->ts);
    insert_after(r, r2);
    return r2;
  }

  void ins(std::size_t p, Item it) {
    if (p > user_size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "insert at " + std::to_string(p) + " in buffer of size " + std::to_string(user_size()));
    }
    cur = nullptr;
    DynCell* c = new_cell(std::move(it));
    if (p > 0) {
      std::size_t off = 0;
      DynRun* left = find_item(p - 1, off);
      if (left->ts == pending() && left->cells.size() < kRunCapacity && off + 1 == left->cells.size()) {
        left->cells.push_back(c);
        c->run = left;
        pull_path(left);
        return;
      }
    }
    std::size_t off = 0;
    DynRun* r = find_item(p, off);
    DynRun* before = off == 0 ? prev_run(r) : r;
    if (off != 0) split(r, off);
    insert_after(before, new_run({c}, pending()));
  }

  void del(std::size_t p) {
    if (p >= user_size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "delete at " + std::to_string(p) + " in buffer of size " + std::to_string(user_size()));
    }
    cur = nullptr;
    std::size_t off = 0;
    DynRun* r = find_item(p, off);
    if (off != 0) r = split(r, off);
    if (r->cells.size() > 1) split(r, 1);
    DynCell* c = r->cells.front();
    drop_memo(c);
    c->dead = true;
    r->cells.clear();
    r->dead.push_back(c);
    r->ts = pending();
    pull_path(r);

    if (DynRun* prev = prev_run(r); prev && prev->tomb()) r = absorb(prev, r);
    if (DynRun* next = next_run(r); next && next->tomb()) r = absorb(r, next);
    if (!prev_run(r)) {
      DynRun* next = next_run(r);
      absorb(next, r);
    }
  }

  // Moves src's dead cells into dst, raises dst's timestamp, removes src.
  DynRun* absorb(DynRun* dst, DynRun* src) {
    for (DynCell* d : src->dead) {
      d->run = dst;
      dst->dead.push_back(d);
    }
    src->dead.clear();
    dst->ts = std::max(dst->ts, src->ts);
    pull_path(dst);
    erase(src);
    return dst;
  }

  // ---- InputSource --------------------------------------------------------

  std::size_t size() const override { return user_size(); }

  const Item& at(std::size_t i) const override {
    if (cur) {
      if (i >= cur_base && i < cur_base + cur->cells.size()) return cur->cells[i - cur_base]->item;
      if (i == cur_base + cur->cells.size()) {
        DynRun* n = next_run(cur);
        while (n && n->tomb()) n = next_run(n);
        if (n) {
          cur_base += cur->cells.size();
          cur = n;
          return cur->cells[0]->item;
        }
      }
    }
    std::size_t off = 0;
    cur = find_item(i, off);
    cur_base = i - off;
    return cur->cells[off]->item;
  }

  // ---- IncrementalHooks ---------------------------------------------------

  void on_read(std::size_t pos) override {
    Frame& top = stack.back();
    top.last = std::max(top.last, pos + 1);
  }

  std::optional<NestedMemoEntry> get_memo(ExprId e, std::size_t pos) override {
    DynCell* c = cell_at(pos);
    auto it = std::find_if(c->memo.begin(), c->memo.end(), [&](const auto& kv) { return kv.first == e.v; });
    if (it != c->memo.end()) {
      const DynEntry& en = it->second;
      std::size_t end_idx = pos + std::max<std::size_t>(en.extent, 1) - 1;
      if (end_idx < total() && ts_range(c, cell_at(end_idx)) == en.saved) {
        ++stats.hits;
        on_read(pos + en.extent - (en.extent ? 1 : 0));
        auto delta = static_cast<std::ptrdiff_t>(pos) - static_cast<std::ptrdiff_t>(en.stored_index);
        NestedMemoEntry out;
        out.success = en.ok;
        out.start = pos;
        out.end = pos + en.advance;
        if (en.ok) {
          out.value = delta ? en.value.shifted(delta) : en.value;
          out.children.reserve(en.children.size());
          for (const auto& ch : en.children) out.children.push_back(delta ? ch.shifted(delta) : ch);
          out.ctx_returns = en.rets;
        }
        return out;
      }
      ++stats.stale;
      c->memo.erase(it);
      --entries;
    }
    ++stats.misses;
    stack.push_back(Frame{e.v, pos, pos});
    return std::nullopt;
  }

  void set_memo(ExprId e, std::size_t pos, const NestedMemoEntry& entry) override {
    while (stack.size() > 1 && !(stack.back().e == e.v && stack.back().pos == pos)) pop_frame();
    if (stack.size() <= 1) {
      throw Error(ErrorCode::StackMismatch, "no pending frame for nested expression at " + std::to_string(pos));
    }
    Frame f = stack.back();
    pop_frame();
    DynEntry en;
    en.ok = entry.success;
    en.advance = entry.success ? entry.end - pos : 0;
    en.extent = f.last > pos ? f.last - pos : 0;
    std::size_t end_idx = pos + std::max<std::size_t>(en.extent, 1) - 1;
    DynCell* c = cell_at(pos);
    en.saved = ts_range(c, cell_at(std::min(end_idx, total() - 1)));
    en.stored_index = pos;
    if (entry.success) {
      en.value = entry.value;
      en.children = entry.children;
      en.rets = entry.ctx_returns;
    }
    auto it = std::find_if(c->memo.begin(), c->memo.end(), [&](const auto& kv) { return kv.first == e.v; });
    if (it != c->memo.end()) {
      it->second = std::move(en);
    } else {
      c->memo.emplace_back(e.v, std::move(en));
      ++entries;
    }
    ++stats.stores;
  }

  bool verify_hits() const override { return verify; }

  void pop_frame() {
    std::size_t last = stack.back().last;
    stack.pop_back();
    stack.back().last = std::max(stack.back().last, last);
  }

  // ---- parsing --------------------------------------------------------------

  ReparseResult reparse(std::string_view start) {
    ++epoch_;
    stats = ReparseStats{};
    stack.clear();
    stack.push_back(Frame{0, 0, 0});
    cur = nullptr;
    if (!session) {
      session = std::make_unique<Session>(g, *this, opts, this);
    } else {
      session->set_input(*this);
    }
    ReparseResult out;
    out.outcome = session->parse(start);
    stats.entries = entries;
    out.stats = stats;
    return out;
  }

  // ---- checks ---------------------------------------------------------------

  std::string check() const {
    std::string why;
    std::size_t tombs = 0, live = 0;
    bool prev_tomb = false;
    bool first = true;
    std::function<void(const DynRun*)> walk = [&](const DynRun* x) {
      if (!x || !why.empty()) return;
      walk(x->l);
      if (!why.empty()) return;
      if (x->l && x->l->p != x) why = "broken parent link";
      if (x->r && x->r->p != x) why = "broken parent link";
      if (x->l && x->l->prio > x->prio) why = "heap order violated";
      if (x->r && x->r->prio > x->prio) why = "heap order violated";
      if (x->size != sz(x->l) + sz(x->r) + x->cells.size()) why = "item count mismatch";
      if (x->runs != rc(x->l) + rc(x->r) + 1) why = "run count mismatch";
      if (x->maxts != std::max({x->ts, mt(x->l), mt(x->r)})) why = "max timestamp mismatch";
      if (x->cells.size() > kRunCapacity) why = "run over capacity";
      for (const DynCell* c : x->cells) {
        if (c->run != x || c->dead) why = "live cell bookkeeping";
      }
      for (const DynCell* c : x->dead) {
        if (c->run != x || !c->dead) why = "dead cell bookkeeping";
      }
      if (x->tomb()) {
        ++tombs;
        if (prev_tomb) why = "adjacent tombstones";
        if (first) why = "leading tombstone";
        if (x->dead.empty()) why = "empty run without deleted items";
      } else {
        ++live;
      }
      prev_tomb = x->tomb();
      first = false;
      walk(x->r);
    };
    if (root && root->p) return "root has a parent";
    walk(root);
    if (!why.empty()) return why;
    if (tombs > live) return "more tombstones than live runs";
    DynRun* last = root;
    while (last && last->r) last = last->r;
    if (!last || last->cells.size() != 1 || !last->cells[0]->eof) return "end slot is not the last run";
    return {};
  }
};

EditBuffer::EditBuffer(const Grammar& g, std::string_view utf8_text, EngineOptions opts)
    : EditBuffer(g, items_from_utf8(utf8_text), opts) {}

EditBuffer::EditBuffer(const Grammar& g, const std::vector<Item>& items, EngineOptions opts)
    : impl_(std::make_unique<Impl>(g, opts)) {
  DynRun* prev = nullptr;
  for (std::size_t i = 0; i < items.size(); i += kRunCapacity) {
    std::vector<DynCell*> cs;
    for (std::size_t j = i; j < std::min(items.size(), i + kRunCapacity); ++j) cs.push_back(impl_->new_cell(items[j]));
    DynRun* r = impl_->new_run(std::move(cs), 0);
    impl_->insert_after(prev, r);
    prev = r;
  }
}

EditBuffer::~EditBuffer() = default;

std::size_t EditBuffer::size() const { return impl_->user_size(); }

Item EditBuffer::chr(std::size_t p) const {
  if (p >= size()) throw Error(ErrorCode::IndexOutOfRange, "chr(" + std::to_string(p) + ") out of range");
  return impl_->cell_at(p)->item;
}

void EditBuffer::ins(std::size_t p, Item item) { impl_->ins(p, std::move(item)); }
void EditBuffer::del(std::size_t p) { impl_->del(p); }
ReparseResult EditBuffer::reparse(std::string_view start) { return impl_->reparse(start); }

std::vector<Item> EditBuffer::items() const {
  std::vector<Item> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(impl_->at(i));
  return out;
}

std::string EditBuffer::text() const {
  std::string out;
  for (const Item& it : items()) {
    if (it.is_scalar()) {
      utf8::append(out, it.as_scalar());
    } else {
      out += print_item(it);
    }
  }
  return out;
}

Marker EditBuffer::rindex(std::size_t n) const {
  if (n > size()) throw Error(ErrorCode::IndexOutOfRange, "rindex(" + std::to_string(n) + ") out of range");
  return Marker(impl_->cell_at(n));
}

std::size_t EditBuffer::index(Marker m) const {
  if (!m.cell_) throw Error(ErrorCode::InvalidArgument, "invalid marker");
  return impl_->index_of(m.cell_);
}

Item EditBuffer::char_at(Marker m) const {
  if (!m.cell_ || m.cell_->eof || m.cell_->dead) {
    throw Error(ErrorCode::IndexOutOfRange, "marker does not point at a live item");
  }
  return m.cell_->item;
}

Marker EditBuffer::next(Marker m) const {
  if (at_end(m)) return m;
  return Marker(impl_->cell_at(index(m) + (m.cell_->dead ? 0 : 1)));
}

bool EditBuffer::at_end(Marker m) const { return m.cell_ && m.cell_->eof; }

std::uint64_t EditBuffer::timestamp_range(Marker from, Marker to) const {
  if (!from.cell_ || !to.cell_) throw Error(ErrorCode::InvalidArgument, "invalid marker");
  return impl_->ts_range(from.cell_, to.cell_);
}

std::uint64_t EditBuffer::epoch() const { return impl_->epoch_; }
std::size_t EditBuffer::memo_entries() const { return impl_->entries; }
std::size_t EditBuffer::run_count() const { return impl_->root ? impl_->root->runs : 0; }

std::size_t EditBuffer::tombstone_count() const {
  std::size_t n = 0;
  std::function<void(const DynRun*)> walk = [&](const DynRun* x) {
    if (!x) return;
    n += x->tomb();
    walk(x->l);
    walk(x->r);
  };
  walk(impl_->root);
  return n;
}

void EditBuffer::set_verify(bool on) { impl_->verify = on; }

std::vector<MemoInfo> EditBuffer::memo_snapshot() const {
  std::vector<MemoInfo> out;
  for (std::size_t i = 0; i <= size(); ++i) {
    const DynCell* c = impl_->cell_at(i);
    for (const auto& [e, en] : c->memo) {
      out.push_back(MemoInfo{i, dump_expr(impl_->g.pool(), ExprId{e}), en.ok, en.advance, en.extent, en.saved});
    }
  }
  return out;
}

std::string EditBuffer::check_invariants() const { return impl_->check(); }

}  // namespace regreg
