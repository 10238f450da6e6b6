#include "regreg/engine.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <unordered_map>

#include "regreg/actions.hpp"
#include "regreg/analysis.hpp"
#include "regreg/utf8.hpp"

namespace regreg {

void EngineOptions::set_memo(std::string_view spec) {
  if (spec == "always") {
    memo = MemoPolicy::Always;
  } else if (spec == "never") {
    memo = MemoPolicy::Never;
  } else if (spec.starts_with("threshold:")) {
    std::string num(spec.substr(10));
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "bad memo threshold '" + num + "'");
    }
    memo = MemoPolicy::Threshold;
    threshold = std::stoull(num);
  } else {
    throw Error(ErrorCode::InvalidArgument, "memo policy must be always, never or threshold:K");
  }
}

std::vector<std::string> ParseOutcome::log() const {
  std::vector<std::string> out;
  for (const auto& [name, v] : ctx_returns) {
    if (name == "log") out.push_back(v.kind() == Value::Kind::Text ? v.text() : v.print());
  }
  return out;
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint32_t kRootScope = kNone;
constexpr std::uint32_t kNestedScope = kNone - 1;
constexpr Symbol kExtraSymbolBase = 0x80000000u;

enum class CK : std::uint8_t { Done, Local, Then, Loop, RuleExit, BindK, EnterK, EnterExit };

struct ContNode {
  CK kind;
  ExprId e;
  std::uint32_t payload;
  std::uint32_t parent;
  bool has_pred = false;
  bool has_enter = false;
  bool local = false;
  std::uint32_t min_size = 0;
  std::uint32_t fid = kNone;
};

struct ContKey {
  CK kind;
  std::uint32_t e, payload, parent;
  friend bool operator==(const ContKey&, const ContKey&) = default;
};

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct ContKeyHash {
  std::size_t operator()(const ContKey& k) const noexcept {
    return mix((std::uint64_t{k.e} << 32 | k.parent) ^ mix(std::uint64_t{k.payload} << 8 | std::uint8_t(k.kind)));
  }
};

struct FKey {
  std::uint32_t tag, payload, a, b, c;
  friend bool operator==(const FKey&, const FKey&) = default;
};

struct FKeyHash {
  std::size_t operator()(const FKey& k) const noexcept {
    return mix(mix(std::uint64_t{k.tag} << 32 | k.payload) ^ (std::uint64_t{k.a} << 32 | k.b) ^ (std::uint64_t{k.c} << 17));
  }
};

enum FTag : std::uint32_t {
  kFSeq = static_cast<std::uint32_t>(Kind::Seq),
  kFEmpty = static_cast<std::uint32_t>(Kind::Empty),
  kFCont = 1000,
};

struct Args {
  std::uint32_t s = 0;
  StopSet stops = 0;
  Value returned;
};

struct Result {
  bool ok = false;
  std::uint32_t end = 0;
  Value returned;
};

using CtxArgs = std::vector<std::pair<std::string, Value>>;

struct Scope {
  std::uint32_t rule = kRootScope;
  std::uint32_t start = 0;
  StopSet saved_stops = 0;
  bool has_actions = true;
  std::vector<std::pair<Symbol, Value>> bindings;
  std::vector<Value> children;
  CtxArgs ctx_saved;
};

struct ManyState {
  std::vector<Value> acc;
  StopSet saved_stops = 0;
  std::uint32_t iter_start = 0;
  std::uint32_t empties = 0;
};

struct EnterInput {
  std::shared_ptr<const std::vector<Item>> items;
  std::uint32_t outer_pos = 0;
  StopSet outer_stops = 0;
};

struct Undo {
  enum class Op : std::uint8_t {
    PushScope,
    PopScope,
    AddChildren,
    Bind,
    PushMany,
    PopMany,
    AddAcc,
    Iter,
    CtxArgs,
    CtxReturn,
    PushInput,
    PopInput,
  };
  Undo(Op op, std::uint32_t a = 0, std::uint32_t b = 0, bool had = false, Value v = {})
      : op(op), a(a), b(b), had(had), v(std::move(v)) {}
  Op op;
  std::uint32_t a;
  std::uint32_t b;
  bool had;
  Value v;
};

struct MemoKey {
  std::uint32_t fe = 0, fk = 0, pos = 0, ctx = 0;
  StopSet stops = 0;
  friend bool operator==(const MemoKey&, const MemoKey&) = default;
};

inline std::uint64_t hash_key(const MemoKey& k) {
  return mix(mix(std::uint64_t{k.fe} << 32 | k.fk) ^ (std::uint64_t{k.pos} << 32 | k.ctx) ^ mix(k.stops));
}

struct MemoVal {
  bool ok = false;
  std::uint32_t end = 0;
  ExprId e;
  std::uint32_t k = 0;
};

// Open addressing, no per-key deletion; clearing bumps a generation.
class FlatMemo {
 public:
  struct Slot {
    std::uint32_t gen = 0;
    MemoKey key;
    MemoVal val;
  };

  FlatMemo() { slots_.resize(kInitial); }

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return slots_.size(); }
  bool full() const { return (count_ + 1) * 2 > slots_.size(); }

  const MemoVal* find(const MemoKey& k, std::uint64_t h) const {
    std::size_t mask = slots_.size() - 1;
    for (std::size_t i = h & mask;; i = (i + 1) & mask) {
      const Slot& s = slots_[i];
      if (s.gen != gen_) return nullptr;
      if (s.key == k) return &s.val;
    }
  }

  void insert(const MemoKey& k, std::uint64_t h, const MemoVal& v) {
    std::size_t mask = slots_.size() - 1;
    for (std::size_t i = h & mask;; i = (i + 1) & mask) {
      Slot& s = slots_[i];
      if (s.gen != gen_) {
        s = Slot{gen_, k, v};
        ++count_;
        return;
      }
      if (s.key == k) {
        s.val = v;
        return;
      }
    }
  }

  void clear() {
    ++gen_;
    count_ = 0;
    if (gen_ == 0) {
      for (auto& s : slots_) s.gen = 0;
      gen_ = 1;
    }
  }

  // Rebuilds into `cap` slots keeping entries that satisfy keep; returns the
  // number dropped.
  template <class Keep>
  std::size_t rebuild(std::size_t cap, Keep keep) {
    std::vector<Slot> old;
    old.swap(slots_);
    std::uint32_t old_gen = gen_;
    slots_.assign(cap, Slot{});
    gen_ = 1;
    count_ = 0;
    std::size_t dropped = 0;
    for (const Slot& s : old) {
      if (s.gen != old_gen) continue;
      if (!keep(s.key)) {
        ++dropped;
        continue;
      }
      insert(s.key, hash_key(s.key), s.val);
    }
    return dropped;
  }

  template <class Fn>
  void for_each(Fn fn) const {
    for (const Slot& s : slots_) {
      if (s.gen == gen_) fn(s.key, s.val);
    }
  }

  static constexpr std::size_t kInitial = 1024;

 private:
  std::vector<Slot> slots_;
  std::uint32_t gen_ = 1;
  std::size_t count_ = 0;
};

struct NKey {
  std::uint32_t e, pos, ctx;
  friend bool operator==(const NKey&, const NKey&) = default;
};
struct NKeyHash {
  std::size_t operator()(const NKey& k) const noexcept { return mix(std::uint64_t{k.e} << 32 | k.pos) ^ k.ctx; }
};

struct Ctl {
  enum class Kind : std::uint8_t { SwitchHead, MemoStore, NestedWait };
  explicit Ctl(Kind k) : kind(k) {}
  Kind kind;
  bool counted = false;
  bool store = false;
  ExprId e;
  std::uint32_t k = 0;
  Args a;
  std::size_t mark = 0;
  MemoKey key{};
  std::uint64_t hash = 0;
  std::uint64_t inv_start = 0;
  std::uint64_t child_cost = 0;
  std::int32_t prev_memo = -1;
  std::size_t ret_start = 0;
  std::unique_ptr<NestedMemoEntry> expected;  // set when verifying a hit
};

struct Info {
  std::int8_t pred = -1;
  std::int8_t enter = -1;
  std::int8_t escapes = -1;
  std::uint32_t fid = kNone;
  std::uint32_t min_size = kNone;
  std::int32_t rule = -2;
  const FirstInfo* f_first = nullptr;  // first info of a choice's fallback
  const ActionSpec* action = nullptr;
};

}  // namespace

struct Session::Impl final : ActionContext {
  Impl(const Grammar& g, EngineOptions o, IncrementalHooks* h) : g(g), pool(g.pool()), opts(o), hooks(h) {
    if (!g.finalized()) throw Error(ErrorCode::InvalidArgument, "grammar must be finalized before parsing");
    k_done = cont(CK::Done, ExprId{}, 0, kNone);
    k_local = cont(CK::Local, ExprId{}, 0, kNone);
    f_empty = fintern(kFEmpty, 0, kNone, kNone, kNone);
    evict_on = opts.evict && !hooks && !g.uses_ctx_returns() && opts.memo != MemoPolicy::Never;
  }

  const Grammar& g;
  const ExprPool& pool;
  EngineOptions opts;
  IncrementalHooks* hooks;
  bool evict_on = false;

  std::unique_ptr<VectorInput> owned;
  const InputSource* src = nullptr;
  const Item* main_data = nullptr;
  std::uint32_t main_len = 0;

  std::unique_ptr<Analyzer> analyzer_;
  std::vector<Info> info;
  std::unordered_map<ExprId, ActionSpec, ExprIdHash> actions;

  std::vector<ContNode> conts;
  std::unordered_map<ContKey, std::uint32_t, ContKeyHash> cont_index;
  std::uint32_t k_done = 0, k_local = 0;

  std::vector<FKey> fnodes;
  std::unordered_map<FKey, std::uint32_t, FKeyHash> findex;
  std::uint32_t f_empty = 0;

  std::vector<Scope> scopes, saved_scopes;
  std::vector<ManyState> manys, saved_manys;
  std::vector<EnterInput> inputs, saved_inputs;
  CtxArgs ctx_args;
  std::vector<CtxArgs> saved_ctx;
  CtxReturns ctx_returns;
  std::vector<Undo> trail;

  std::vector<Ctl> ctl;
  std::int32_t top_memo = -1;
  std::uint32_t alternatives = 0;
  std::uint32_t watermark = 0;

  FlatMemo memo;
  struct SideSlot {
    std::uint32_t gen = 0;
    MemoKey key;
    MemoVal val;
  };
  std::array<SideSlot, 512> side{};
  std::uint32_t side_gen = 1;
  std::unordered_map<NKey, NestedMemoEntry, NKeyHash> nested_memo;

  std::unordered_map<std::string, std::uint32_t> ctx_ids;
  std::uint32_t ctx_id = 0;
  bool ctx_dirty = false;
  std::unordered_map<std::string, Symbol> extra_syms;
  std::vector<std::string> extra_names;

  Args* cur = nullptr;

  std::uint64_t invocations = 0, memo_hits = 0, memo_misses = 0, memo_reruns = 0, memo_stores = 0, evicted = 0,
                side_hits = 0, pruned = 0, nested_hits = 0, nested_misses = 0, peak_entries = 0, max_ctl = 0;

  // ---- input -------------------------------------------------------------

  void bind_input(const InputSource& in) {
    src = &in;
    main_data = in.data();
    main_len = static_cast<std::uint32_t>(in.size());
    memo.clear();
    if (++side_gen == 0) side_gen = 1;
    nested_memo.clear();
  }

  std::uint32_t len() const {
    return inputs.empty() ? main_len : static_cast<std::uint32_t>(inputs.back().items->size());
  }
  const Item& item(std::uint32_t i) const {
    if (!inputs.empty()) return (*inputs.back().items)[i];
    return main_data ? main_data[i] : src->at(i);
  }
  void note_read(std::uint32_t i) {
    if (hooks && inputs.empty()) hooks->on_read(i);
  }

  // ---- per-expression facts ---------------------------------------------

  Info& inf(ExprId e) {
    if (e.v >= info.size()) info.resize(std::max<std::size_t>(pool.size(), e.v + 1));
    return info[e.v];
  }

  Analyzer& analyzer() {
    if (!analyzer_) analyzer_ = std::make_unique<Analyzer>(g);
    return *analyzer_;
  }

  std::int32_t rule_of(ExprId e) {
    Info& i = inf(e);
    if (i.rule == -2) {
      auto r = g.find_rule(pool.node(e).payload);
      inf(e).rule = r ? static_cast<std::int32_t>(*r) : -1;
    }
    return inf(e).rule;
  }

  bool pred(ExprId e) {
    if (inf(e).pred >= 0) return inf(e).pred;
    const ExprNode& n = pool.node(e);
    bool v = false;
    if (n.kind == Kind::Act) {
      v = action_of(e).kind == ActionKind::Predicate;
    } else if (n.kind == Kind::RuleRef) {
      std::int32_t r = rule_of(e);
      v = r >= 0 && g.info(static_cast<std::size_t>(r)).has_predicate;
    } else {
      for (int i = 0; i < n.arity() && !v; ++i) v = pred(n.kids[i]);
    }
    inf(e).pred = v;
    return v;
  }

  bool enter(ExprId e) {
    if (inf(e).enter >= 0) return inf(e).enter;
    const ExprNode& n = pool.node(e);
    bool v = false;
    if (n.kind == Kind::Enter) {
      v = true;
    } else if (n.kind == Kind::RuleRef) {
      std::int32_t r = rule_of(e);
      v = r >= 0 && g.info(static_cast<std::size_t>(r)).has_enter;
    } else {
      for (int i = 0; i < n.arity() && !v; ++i) v = enter(n.kids[i]);
    }
    inf(e).enter = v;
    return v;
  }

  // Whether e can report success without running its continuation.
  bool escapes(ExprId e) {
    if (inf(e).escapes >= 0) return inf(e).escapes;
    inf(e).escapes = 0;  // provisional, breaks cycles through rules
    const ExprNode& n = pool.node(e);
    bool v = false;
    switch (n.kind) {
      case Kind::Success: v = true; break;
      case Kind::Nested: v = false; break;
      case Kind::RuleRef: {
        std::int32_t r = rule_of(e);
        v = r >= 0 && escapes(g.rules()[static_cast<std::size_t>(r)].body);
        break;
      }
      case Kind::Switch: {
        bool local_head = n.kids[1] != pool.success() && is_local_head(n.kids[0]);
        v = (!local_head && escapes(n.kids[0])) || (n.kids[1] != pool.success() && escapes(n.kids[1])) ||
            escapes(n.kids[2]);
        break;
      }
      default:
        for (int i = 0; i < n.arity() && !v; ++i) v = escapes(n.kids[i]);
    }
    inf(e).escapes = v;
    return v;
  }

  std::uint32_t min_size(ExprId e) {
    if (inf(e).min_size == kNone) {
      auto b = analyzer().size_bounds(e);
      inf(e).min_size = static_cast<std::uint32_t>(b.min);
    }
    return inf(e).min_size;
  }

  bool is_local_head(ExprId head) const {
    const ExprNode& h = pool.node(head);
    return h.kind == Kind::Seq && h.kids[1] == pool.success();
  }

  const FirstInfo& fallback_first(ExprId sw) {
    Info& i = inf(sw);
    if (!i.f_first) {
      const FirstInfo* f = &analyzer().quick_first(pool.node(sw).kids[2]);
      inf(sw).f_first = f;
    }
    return *inf(sw).f_first;
  }

  const ActionSpec& action_of(ExprId e) {
    if (const ActionSpec* a = inf(e).action) return *a;
    auto it = actions.find(e);
    if (it == actions.end()) {
      const std::string& name = pool.name(pool.node(e).payload);
      auto spec = g.actions().resolve(name);
      if (!spec) throw Error(ErrorCode::UnknownActionHandle, "action '" + name + "' is not registered");
      it = actions.emplace(e, std::move(*spec)).first;
    }
    inf(e).action = &it->second;
    return it->second;
  }

  // ---- continuations ------------------------------------------------------

  std::uint32_t cont(CK kind, ExprId e, std::uint32_t payload, std::uint32_t parent) {
    ContKey key{kind, e.v, payload, parent};
    if (auto it = cont_index.find(key); it != cont_index.end()) return it->second;
    ContNode c{kind, e, payload, parent};
    const ContNode* p = parent == kNone ? nullptr : &conts[parent];
    bool pp = p && p->has_pred, pe = p && p->has_enter;
    std::uint32_t pm = p ? p->min_size : 0;
    switch (kind) {
      case CK::Done: break;
      case CK::Local: c.local = true; break;
      case CK::Then:
        c.has_pred = pred(e) || pp;
        c.has_enter = enter(e) || pe;
        c.local = e == pool.success();
        if (opts.prune) {
          std::uint64_t m = std::uint64_t{min_size(e)} + (escapes(e) ? 0 : pm);
          c.min_size = static_cast<std::uint32_t>(std::min<std::uint64_t>(m, SizeBounds::kInfinite));
        }
        break;
      case CK::Loop:
        c.has_pred = pred(e) || pp;
        c.has_enter = enter(e) || pe;
        c.min_size = pm;
        break;
      case CK::RuleExit:
      case CK::BindK:
        c.has_pred = pp;
        c.has_enter = pe;
        c.local = kind == CK::BindK && p && p->local;
        c.min_size = pm;
        break;
      case CK::EnterK:
        c.has_pred = pred(e) || pp;
        c.has_enter = true;
        break;
      case CK::EnterExit:
        c.has_pred = pp;
        c.has_enter = true;
        break;
    }
    auto id = static_cast<std::uint32_t>(conts.size());
    conts.push_back(c);
    cont_index.emplace(key, id);
    return id;
  }

  // ---- forgetful ids for memo keys ---------------------------------------

  std::uint32_t fintern(std::uint32_t tag, std::uint32_t payload, std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    FKey key{tag, payload, a, b, c};
    if (auto it = findex.find(key); it != findex.end()) return it->second;
    auto id = static_cast<std::uint32_t>(fnodes.size());
    fnodes.push_back(key);
    findex.emplace(key, id);
    return id;
  }

  std::uint32_t fcat(std::uint32_t x, std::uint32_t y) {
    if (x == f_empty) return y;
    if (y == f_empty) return x;
    if (fnodes[x].tag == kFSeq) {
      FKey fx = fnodes[x];
      return fintern(kFSeq, 0, fx.a, fcat(fx.b, y), kNone);
    }
    return fintern(kFSeq, 0, x, y, kNone);
  }

  std::uint32_t fid(ExprId e) {
    if (inf(e).fid != kNone) return inf(e).fid;
    const ExprNode n = pool.node(e);
    std::uint32_t out;
    switch (n.kind) {
      case Kind::Act:
      case Kind::Empty: out = f_empty; break;
      case Kind::Bind: out = fid(n.kids[0]); break;
      case Kind::Seq: out = fcat(fid(n.kids[0]), fid(n.kids[1])); break;
      default: {
        std::array<std::uint32_t, 3> k{kNone, kNone, kNone};
        for (int i = 0; i < n.arity(); ++i) k[i] = fid(n.kids[i]);
        std::uint32_t tag = static_cast<std::uint32_t>(n.kind) | (n.eager ? 0x100u : 0u);
        out = fintern(tag, n.payload, k[0], k[1], k[2]);
      }
    }
    inf(e).fid = out;
    return out;
  }

  std::uint32_t fid_cont(std::uint32_t k) {
    if (conts[k].fid != kNone) return conts[k].fid;
    const ContNode c = conts[k];
    std::uint32_t tag = kFCont + static_cast<std::uint32_t>(c.kind);
    std::uint32_t out;
    switch (c.kind) {
      case CK::Done:
      case CK::Local: out = fintern(tag, 0, kNone, kNone, kNone); break;
      case CK::Then: {
        std::uint32_t fe = fid(c.e);
        out = fe == f_empty ? fid_cont(c.parent) : fintern(tag, 0, fe, fid_cont(c.parent), kNone);
        break;
      }
      case CK::BindK: out = fid_cont(c.parent); break;
      case CK::RuleExit: out = fintern(tag, c.payload, fid_cont(c.parent), kNone, kNone); break;
      case CK::Loop:
      case CK::EnterK: out = fintern(tag, 0, fid(c.e), fid_cont(c.parent), kNone); break;
      case CK::EnterExit: out = fintern(tag, 0, fid_cont(c.parent), kNone, kNone); break;
      default: out = kNone;
    }
    conts[k].fid = out;
    return out;
  }

  std::string print_cont(std::uint32_t k) const {
    std::string out;
    while (k != kNone) {
      const ContNode& c = conts[k];
      switch (c.kind) {
        case CK::Done: out += "Done"; break;
        case CK::Local: out += "Local"; break;
        case CK::Then: {
          std::string d = dump_expr(pool, c.e, true);
          if (d != "Empty") out += "Then(" + d + ").";
          break;
        }
        case CK::BindK: break;
        case CK::Loop: out += "Loop(" + dump_expr(pool, c.e, true) + ")."; break;
        case CK::RuleExit: out += "Exit(" + pool.name(g.rules()[c.payload].name) + ")."; break;
        case CK::EnterK: out += "EnterK(" + dump_expr(pool, c.e, true) + ")."; break;
        case CK::EnterExit: out += "EnterExit."; break;
      }
      k = c.parent;
    }
    return out;
  }

  // ---- contextual arguments ----------------------------------------------

  std::uint32_t ctx_digest() {
    if (!g.uses_ctx_args() || ctx_args.empty()) return 0;
    if (ctx_dirty) {
      CtxArgs sorted = ctx_args;
      std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      std::string s;
      for (const auto& [n, v] : sorted) s += n + "=" + v.print() + ";";
      auto [it, fresh] = ctx_ids.try_emplace(s, static_cast<std::uint32_t>(ctx_ids.size() + 1));
      ctx_id = it->second;
      ctx_dirty = false;
    }
    return ctx_id;
  }

  void replace_ctx_args(CtxArgs next) {
    saved_ctx.push_back(std::move(ctx_args));
    trail.push_back({Undo::Op::CtxArgs});
    ctx_args = std::move(next);
    ctx_dirty = true;
  }

  // ---- trailed state -----------------------------------------------------

  void push_scope(Scope s) {
    scopes.push_back(std::move(s));
    trail.push_back({Undo::Op::PushScope});
  }

  void pop_scope() {
    saved_scopes.push_back(std::move(scopes.back()));
    scopes.pop_back();
    trail.push_back({Undo::Op::PopScope});
  }

  void add_children(const std::vector<Value>& vs) {
    if (vs.empty()) return;
    auto si = static_cast<std::uint32_t>(scopes.size() - 1);
    auto& ch = scopes[si].children;
    ch.insert(ch.end(), vs.begin(), vs.end());
    trail.push_back({Undo::Op::AddChildren, si, static_cast<std::uint32_t>(vs.size())});
  }

  void add_child(Value v) {
    auto si = static_cast<std::uint32_t>(scopes.size() - 1);
    scopes[si].children.push_back(std::move(v));
    trail.push_back({Undo::Op::AddChildren, si, 1});
  }

  void set_binding(Symbol s, Value v) {
    auto si = static_cast<std::uint32_t>(scopes.size() - 1);
    auto& b = scopes[si].bindings;
    for (std::uint32_t i = 0; i < b.size(); ++i) {
      if (b[i].first == s) {
        trail.push_back({Undo::Op::Bind, si, i, true, std::move(b[i].second)});
        b[i].second = std::move(v);
        return;
      }
    }
    b.emplace_back(s, std::move(v));
    trail.push_back({Undo::Op::Bind, si, static_cast<std::uint32_t>(b.size() - 1), false});
  }

  void emit_return(std::string name, Value v) {
    ctx_returns.emplace_back(std::move(name), std::move(v));
    trail.push_back({Undo::Op::CtxReturn});
  }

  void undo_to(std::size_t mark) {
    while (trail.size() > mark) {
      Undo u = std::move(trail.back());
      trail.pop_back();
      switch (u.op) {
        case Undo::Op::PushScope: scopes.pop_back(); break;
        case Undo::Op::PopScope:
          scopes.push_back(std::move(saved_scopes.back()));
          saved_scopes.pop_back();
          break;
        case Undo::Op::AddChildren: {
          auto& ch = scopes[u.a].children;
          ch.resize(ch.size() - u.b);
          break;
        }
        case Undo::Op::Bind: {
          auto& b = scopes[u.a].bindings;
          if (u.had) {
            b[u.b].second = std::move(u.v);
          } else {
            b.pop_back();
          }
          break;
        }
        case Undo::Op::PushMany: manys.pop_back(); break;
        case Undo::Op::PopMany:
          manys.push_back(std::move(saved_manys.back()));
          saved_manys.pop_back();
          break;
        case Undo::Op::AddAcc: manys.back().acc.pop_back(); break;
        case Undo::Op::Iter:
          manys.back().iter_start = u.a;
          manys.back().empties = u.b;
          break;
        case Undo::Op::CtxArgs:
          ctx_args = std::move(saved_ctx.back());
          saved_ctx.pop_back();
          ctx_dirty = true;
          break;
        case Undo::Op::CtxReturn: ctx_returns.pop_back(); break;
        case Undo::Op::PushInput: inputs.pop_back(); break;
        case Undo::Op::PopInput:
          inputs.push_back(std::move(saved_inputs.back()));
          saved_inputs.pop_back();
          break;
      }
    }
  }

  void reset_state() {
    scopes.clear();
    saved_scopes.clear();
    manys.clear();
    saved_manys.clear();
    inputs.clear();
    saved_inputs.clear();
    ctx_args.clear();
    saved_ctx.clear();
    ctx_returns.clear();
    trail.clear();
    ctl.clear();
    top_memo = -1;
    alternatives = 0;
    watermark = 0;
    ctx_dirty = true;
    cur = nullptr;
    scopes.push_back(Scope{});
    invocations = memo_hits = memo_misses = memo_reruns = memo_stores = evicted = side_hits = pruned = nested_hits =
        nested_misses = max_ctl = 0;
    peak_entries = live_entries();
  }

  // ---- ActionContext -----------------------------------------------------

  Symbol symbol_for(std::string_view name) {
    if (auto s = pool.lookup(name)) return *s;
    auto [it, fresh] = extra_syms.try_emplace(std::string(name), kExtraSymbolBase + static_cast<Symbol>(extra_names.size()));
    if (fresh) extra_names.emplace_back(name);
    return it->second;
  }

  const Value& returned() const override { return cur->returned; }
  void set_returned(Value v) override { cur->returned = std::move(v); }
  const Value* binding(std::string_view name) const override {
    std::optional<Symbol> s = pool.lookup(name);
    if (!s) {
      auto it = extra_syms.find(std::string(name));
      if (it == extra_syms.end()) return nullptr;
      s = it->second;
    }
    for (const auto& [k, v] : scopes.back().bindings) {
      if (k == *s) return &v;
    }
    return nullptr;
  }
  void bind(std::string_view name, Value v) override { set_binding(symbol_for(name), std::move(v)); }
  const Value* ctx_arg(std::string_view name) const override {
    for (const auto& [k, v] : ctx_args) {
      if (k == name) return &v;
    }
    return nullptr;
  }
  void set_ctx_arg(std::string_view name, Value v) override {
    CtxArgs next = ctx_args;
    bool found = false;
    for (auto& [k, old] : next) {
      if (k == name) {
        old = v;
        found = true;
      }
    }
    if (!found) next.emplace_back(std::string(name), std::move(v));
    replace_ctx_args(std::move(next));
  }
  void emit(std::string_view name, Value v) override { emit_return(std::string(name), std::move(v)); }
  std::size_t position() const override { return cur->s; }
  Span rule_span() const override { return Span{scopes.back().start, cur->s}; }
  std::string matched_text() const override {
    std::string out;
    for (std::uint32_t i = scopes.back().start; i < cur->s; ++i) {
      const Item& it = item(i);
      if (it.is_scalar()) {
        utf8::append(out, it.as_scalar());
      } else {
        out += print_item(it);
      }
    }
    return out;
  }

  // ---- memo tables -------------------------------------------------------

  std::size_t live_entries() const { return memo.size() + nested_memo.size(); }

  void note_peak() { peak_entries = std::max<std::uint64_t>(peak_entries, live_entries()); }

  void make_room() {
    if (!memo.full()) return;
    if (evict_on) {
      std::uint32_t w = watermark;
      std::size_t dropped = memo.rebuild(memo.capacity(), [w](const MemoKey& k) { return k.pos >= w; });
      dropped += std::erase_if(nested_memo, [w](const auto& kv) { return kv.first.pos < w; });
      evicted += dropped;
      if (memo.size() * 4 <= memo.capacity()) return;
    }
    memo.rebuild(memo.capacity() * 2, [](const MemoKey&) { return true; });
  }

  const MemoVal* memo_find(const MemoKey& k, std::uint64_t h) {
    if (opts.memo == MemoPolicy::Threshold) {
      const SideSlot& s = side[h & (side.size() - 1)];
      if (s.gen == side_gen && s.key == k) {
        ++side_hits;
        return &s.val;
      }
    }
    return memo.find(k, h);
  }

  void memo_store(Ctl& f, const Result& r) {
    if (evict_on && f.key.pos < watermark) return;
    std::uint64_t total = invocations - f.inv_start;
    MemoVal v{r.ok, r.end, f.e, f.k};
    bool main = true;
    if (opts.memo == MemoPolicy::Threshold) {
      std::uint64_t self = total > f.child_cost ? total - f.child_cost : 0;
      main = self >= opts.threshold;
    }
    if (!main) {
      side[f.hash & (side.size() - 1)] = SideSlot{side_gen, f.key, v};
      return;
    }
    make_room();
    memo.insert(f.key, f.hash, v);
    ++memo_stores;
    note_peak();
    if (f.prev_memo >= 0) ctl[static_cast<std::size_t>(f.prev_memo)].child_cost += total;
  }

  void nested_store(Ctl& f, NestedMemoEntry ent) {
    if (hooks) {
      hooks->set_memo(f.e, f.a.s, ent);
      return;
    }
    if (evict_on && f.a.s < watermark) return;
    if (opts.memo == MemoPolicy::Threshold && invocations - f.inv_start < opts.threshold) return;
    make_room();
    nested_memo.insert_or_assign(NKey{f.e.v, f.a.s, f.key.ctx}, std::move(ent));
    ++memo_stores;
    note_peak();
  }

  bool memo_ok(ExprId e, std::uint32_t k) {
    return opts.memo != MemoPolicy::Never && !hooks && inputs.empty() && !pred(e) && !enter(e) &&
           !conts[k].has_pred && !conts[k].has_enter;
  }

  void push_ctl(Ctl c) {
    ctl.push_back(std::move(c));
    if (ctl.size() > max_ctl) max_ctl = ctl.size();
  }

  void advance_watermark(std::uint32_t s) {
    if (s <= watermark) return;
    watermark = s;
    while (!ctl.empty() && ctl.back().kind == Ctl::Kind::MemoStore && ctl.back().key.pos < watermark) {
      top_memo = ctl.back().prev_memo;
      ctl.pop_back();
    }
  }

  [[noreturn]] void no_progress(ExprId many, std::uint32_t s) {
    std::string shown = dump_expr(pool, many);
    if (shown.size() > 80) shown = shown.substr(0, 77) + "...";
    throw Error(ErrorCode::IterationNoProgress,
                "iteration " + shown + " matched empty twice at position " + std::to_string(s));
  }

  bool item_matches(ExprId e, const ExprNode& n, std::uint32_t s) {
    std::uint32_t n_items = len();
    note_read(s);
    if (s >= n_items) return false;
    if (opts.inject_fault && s + 1 == n_items) return false;
    if (n.kind == Kind::AnyItem) return true;
    const Item& it = item(s);
    return it.is_scalar() && pool.charset(e).contains(it.as_scalar());
  }

  // True when the continuation replaces the returned value before anything
  // can read it, so building that value is wasted work.
  bool overwrites_value(std::uint32_t k) const {
    const ContNode& c = conts[k];
    if (c.kind != CK::Then) return false;
    ExprId e = c.e;
    for (;;) {
      const ExprNode& n = pool.node(e);
      if (n.kind == Kind::CharSet || n.kind == Kind::AnyItem) return true;
      if (n.kind != Kind::Seq) return false;
      e = n.kids[0];
    }
  }

  // ---- the matcher -------------------------------------------------------

  Result run(ExprId e, std::uint32_t k, Args a) {
    enum class Mode { Eval, Call, Ret } mode = Mode::Eval;
    Result res;
    const std::size_t base = ctl.size();
    for (;;) {
      switch (mode) {
        case Mode::Eval: {
          const ExprNode& n = pool.node(e);
          // Leaf tests and sequencing are inlined; only compound matchers count as calls.
          if (n.kind == Kind::Switch || n.kind == Kind::RuleRef || n.kind == Kind::Many ||
              n.kind == Kind::Nested || n.kind == Kind::Enter) {
            ++invocations;
            if (opts.max_invocations && invocations > opts.max_invocations) {
              throw Error(ErrorCode::BudgetExceeded,
                          "more than " + std::to_string(opts.max_invocations) + " match invocations");
            }
          }
          if (evict_on && alternatives == 0 && inputs.empty()) advance_watermark(a.s);
          if (opts.prune && inputs.empty() && !conts[k].has_enter) {
            std::uint64_t need = std::uint64_t{min_size(e)} + (escapes(e) ? 0 : conts[k].min_size);
            if (need > main_len - a.s) {
              ++pruned;
              res = Result{};
              mode = Mode::Ret;
              break;
            }
          }
          switch (n.kind) {
            case Kind::CharSet:
            case Kind::AnyItem:
              if (item_matches(e, n, a.s)) {
                a.returned = Value::atom(item(a.s));
                ++a.s;
                mode = Mode::Call;
              } else {
                res = Result{};
                mode = Mode::Ret;
              }
              break;
            case Kind::Empty: mode = Mode::Call; break;
            case Kind::Success:
              res = Result{true, a.s, a.returned};
              mode = Mode::Ret;
              break;
            case Kind::Fail:
              res = Result{};
              mode = Mode::Ret;
              break;
            case Kind::Seq:
              k = cont(CK::Then, n.kids[1], 0, k);
              e = n.kids[0];
              break;
            case Kind::Stop:
              a.stops |= stop_bit(n.payload);
              mode = Mode::Call;
              break;
            case Kind::Bind:
              k = cont(CK::BindK, ExprId{}, n.payload, k);
              e = n.kids[0];
              break;
            case Kind::Enter:
              k = cont(CK::EnterK, n.kids[1], 0, k);
              e = n.kids[0];
              break;
            case Kind::Many:
              manys.push_back(ManyState{{}, a.stops, a.s, 0});
              trail.push_back({Undo::Op::PushMany});
              a.stops = 0;
              k = cont(CK::Loop, e, 0, k);
              e = n.kids[0];
              break;
            case Kind::Act: {
              const ActionSpec& spec = action_of(e);
              cur = &a;
              bool ok = spec.fn(*this);
              cur = nullptr;
              if (ok) {
                mode = Mode::Call;
              } else {
                res = Result{};
                mode = Mode::Ret;
              }
              break;
            }
            case Kind::Switch:
            case Kind::RuleRef: {
              bool rerun = false;
              if (memo_ok(e, k)) {
                MemoKey key{fid(e), fid_cont(k), a.s, ctx_digest(), a.stops};
                std::uint64_t h = hash_key(key);
                if (const MemoVal* hit = memo_find(key, h)) {
                  if (!hit->ok) {
                    ++memo_hits;
                    res = Result{};
                    mode = Mode::Ret;
                    break;
                  }
                  if (conts[k].local) {
                    ++memo_hits;
                    res = Result{true, hit->end, a.returned};
                    mode = Mode::Ret;
                    break;
                  }
                  ++memo_reruns;
                  rerun = true;
                }
                if (!rerun) {
                  ++memo_misses;
                  Ctl c(Ctl::Kind::MemoStore);
                  c.e = e;
                  c.k = k;
                  c.key = key;
                  c.hash = h;
                  c.inv_start = invocations;
                  c.prev_memo = top_memo;
                  top_memo = static_cast<std::int32_t>(ctl.size());
                  push_ctl(std::move(c));
                }
              }
              if (n.kind == Kind::RuleRef) {
                std::int32_t r = rule_of(e);
                if (r < 0) throw Error(ErrorCode::UnknownRule, "rule '" + pool.name(n.payload) + "' is not defined");
                auto ri = static_cast<std::size_t>(r);
                Scope sc;
                sc.rule = static_cast<std::uint32_t>(ri);
                sc.start = a.s;
                sc.saved_stops = a.stops;
                sc.has_actions = g.info(ri).has_actions;
                if (g.uses_ctx_args()) sc.ctx_saved = ctx_args;
                push_scope(std::move(sc));
                k = cont(CK::RuleExit, ExprId{}, static_cast<std::uint32_t>(ri), k);
                a.stops = 0;
                a.returned = Value{};
                e = g.rules()[ri].body;
                break;
              }
              const bool choice = n.kids[1] == pool.success();
              if (choice) {
                const FirstInfo& ff = fallback_first(e);
                if (!ff.nullable) {
                  note_read(a.s);
                  if (a.s >= len() || !ff.may_start_with(item(a.s))) {
                    e = n.kids[0];
                    break;
                  }
                }
              }
              Ctl c(Ctl::Kind::SwitchHead);
              c.counted = true;
              c.e = e;
              c.k = k;
              c.a = a;
              c.mark = trail.size();
              push_ctl(std::move(c));
              ++alternatives;
              if (!choice && is_local_head(n.kids[0])) k = k_local;
              e = n.kids[0];
              break;
            }
            case Kind::Nested: {
              bool store = false;
              std::unique_ptr<NestedMemoEntry> expected;
              const bool can_memo = opts.memo != MemoPolicy::Never && inputs.empty() && !pred(e) && !enter(e);
              std::uint32_t ctx = can_memo ? ctx_digest() : 0;
              if (can_memo) {
                std::optional<NestedMemoEntry> hit;
                if (hooks) {
                  hit = hooks->get_memo(e, a.s);
                } else if (auto it = nested_memo.find(NKey{e.v, a.s, ctx}); it != nested_memo.end()) {
                  hit = it->second;
                }
                if (hit && hooks && hooks->verify_hits()) {
                  expected = std::make_unique<NestedMemoEntry>(std::move(*hit));
                  hit.reset();
                }
                if (hit) {
                  ++nested_hits;
                  ++memo_hits;
                  if (!hit->success) {
                    res = Result{};
                    mode = Mode::Ret;
                    break;
                  }
                  add_children(hit->children);
                  for (auto& [name, v] : hit->ctx_returns) emit_return(name, v);
                  a.s = static_cast<std::uint32_t>(hit->end);
                  a.returned = hit->value;
                  mode = Mode::Call;
                  break;
                }
                if (!expected) {
                  ++nested_misses;
                  store = true;
                }
              }
              Ctl c(Ctl::Kind::NestedWait);
              c.store = store;
              c.e = e;
              c.k = k;
              c.a = a;
              c.mark = trail.size();
              c.key.ctx = ctx;
              c.ret_start = ctx_returns.size();
              c.inv_start = invocations;
              c.expected = std::move(expected);
              push_ctl(std::move(c));
              Scope sc;
              sc.rule = kNestedScope;
              sc.start = a.s;
              sc.saved_stops = a.stops;
              push_scope(std::move(sc));
              a.stops = 0;
              a.returned = Value{};
              k = cont(CK::Then, n.kids[1], 0, cont(CK::Then, n.kids[2], 0, k_done));
              e = n.kids[0];
              break;
            }
          }
          break;
        }

        case Mode::Call: {
          const ContNode c = conts[k];
          switch (c.kind) {
            case CK::Done:
              if (a.stops != 0) throw Error(ErrorCode::EngineBug, "stop reached outside any iteration");
              res = Result{true, a.s, a.returned};
              mode = Mode::Ret;
              break;
            case CK::Local:
              res = Result{true, a.s, a.returned};
              mode = Mode::Ret;
              break;
            case CK::Then:
              e = c.e;
              k = c.parent;
              mode = Mode::Eval;
              break;
            case CK::BindK:
              set_binding(c.payload, a.returned);
              k = c.parent;
              break;
            case CK::Loop: {
              ManyState& m = manys.back();
              if (a.stops != 0) {
                Value list = overwrites_value(c.parent) ? Value{} : Value::list(m.acc);
                StopSet saved = m.saved_stops;
                saved_manys.push_back(std::move(m));
                manys.pop_back();
                trail.push_back({Undo::Op::PopMany});
                a.stops = saved;
                a.returned = std::move(list);
                k = c.parent;
                break;
              }
              trail.push_back({Undo::Op::Iter, m.iter_start, m.empties});
              if (a.s == m.iter_start) {
                if (++m.empties >= 2) no_progress(c.e, a.s);
              } else {
                m.iter_start = a.s;
                m.empties = 0;
              }
              m.acc.push_back(a.returned);
              trail.push_back({Undo::Op::AddAcc});
              e = pool.node(c.e).kids[0];
              mode = Mode::Eval;
              break;
            }
            case CK::RuleExit: {
              if (a.stops != 0) throw Error(ErrorCode::EngineBug, "stop reached outside any iteration");
              Scope& sc = scopes.back();
              Value v = sc.has_actions
                            ? a.returned
                            : Value::node(pool.name(g.rules()[c.payload].name), sc.children, Span{sc.start, a.s});
              StopSet saved = sc.saved_stops;
              CtxArgs restore;
              bool ctx = g.uses_ctx_args();
              if (ctx) restore = sc.ctx_saved;
              pop_scope();
              add_child(v);
              if (ctx) replace_ctx_args(std::move(restore));
              a.stops = saved;
              a.returned = std::move(v);
              k = c.parent;
              break;
            }
            case CK::EnterK: {
              EnterInput in;
              in.items = std::make_shared<const std::vector<Item>>(value_to_items(a.returned));
              in.outer_pos = a.s;
              in.outer_stops = a.stops;
              inputs.push_back(std::move(in));
              trail.push_back({Undo::Op::PushInput});
              a.s = 0;
              a.stops = 0;
              a.returned = Value{};
              e = c.e;
              k = cont(CK::EnterExit, ExprId{}, 0, c.parent);
              mode = Mode::Eval;
              break;
            }
            case CK::EnterExit: {
              if (a.s != len()) {
                res = Result{};
                mode = Mode::Ret;
                break;
              }
              EnterInput& in = inputs.back();
              a.s = in.outer_pos;
              a.stops = in.outer_stops;
              saved_inputs.push_back(std::move(in));
              inputs.pop_back();
              trail.push_back({Undo::Op::PopInput});
              k = c.parent;
              break;
            }
          }
          break;
        }

        case Mode::Ret: {
          if (ctl.size() == base) return res;
          Ctl& f = ctl.back();
          switch (f.kind) {
            case Ctl::Kind::SwitchHead: {
              if (f.counted) --alternatives;
              const ExprNode& n = pool.node(f.e);
              if (res.ok && n.kids[1] == pool.success()) {
                ctl.pop_back();
                break;
              }
              undo_to(f.mark);
              a = std::move(f.a);
              k = f.k;
              e = res.ok ? n.kids[1] : n.kids[2];
              ctl.pop_back();
              mode = Mode::Eval;
              break;
            }
            case Ctl::Kind::MemoStore: {
              Ctl done = std::move(f);
              ctl.pop_back();
              top_memo = done.prev_memo;
              memo_store(done, res);
              break;
            }
            case Ctl::Kind::NestedWait: {
              Ctl done = std::move(f);
              ctl.pop_back();
              if (done.expected) check_hit(*done.expected, res);
              if (!res.ok) {
                undo_to(done.mark);
                if (done.store) nested_store(done, NestedMemoEntry{false, done.a.s, done.a.s, {}, {}, {}});
                break;
              }
              Value v = res.returned.frozen();
              std::vector<Value> kids = scopes.back().children;
              if (done.store) {
                CtxReturns rets(ctx_returns.begin() + static_cast<std::ptrdiff_t>(done.ret_start), ctx_returns.end());
                nested_store(done, NestedMemoEntry{true, done.a.s, res.end, v, kids, std::move(rets)});
              }
              pop_scope();
              add_children(kids);
              a = std::move(done.a);
              a.s = res.end;
              a.returned = std::move(v);
              k = done.k;
              mode = Mode::Call;
              break;
            }
          }
          break;
        }
      }
    }
  }

  void check_hit(const NestedMemoEntry& want, const Result& got) {
    bool same = want.success == got.ok;
    if (same && got.ok) {
      same = want.end == got.end && want.value == got.returned.frozen() && want.children == scopes.back().children;
    }
    if (!same) {
      throw Error(ErrorCode::EngineBug, "stale nested memo entry at position " + std::to_string(want.start));
    }
  }

  ParseOutcome finish(const Result& r) {
    ParseOutcome out;
    out.success = r.ok;
    if (r.ok) {
      out.end = r.end;
      out.value = r.returned;
      out.ctx_returns = ctx_returns;
    }
    if (opts.stats) {
      out.stats = {
          {"invocations", static_cast<std::int64_t>(invocations)},
          {"memo_hits", static_cast<std::int64_t>(memo_hits)},
          {"memo_misses", static_cast<std::int64_t>(memo_misses)},
          {"memo_reruns", static_cast<std::int64_t>(memo_reruns)},
          {"memo_stores", static_cast<std::int64_t>(memo_stores)},
          {"memo_entries", static_cast<std::int64_t>(live_entries())},
          {"peak_memo_entries", static_cast<std::int64_t>(peak_entries)},
          {"evicted", static_cast<std::int64_t>(evicted)},
          {"side_cache_hits", static_cast<std::int64_t>(side_hits)},
          {"depth_pruned", static_cast<std::int64_t>(pruned)},
          {"nested_hits", static_cast<std::int64_t>(nested_hits)},
          {"nested_misses", static_cast<std::int64_t>(nested_misses)},
          {"continuations", static_cast<std::int64_t>(conts.size())},
          {"max_control_depth", static_cast<std::int64_t>(max_ctl)},
          {"watermark", static_cast<std::int64_t>(watermark)},
          {"eviction_enabled", evict_on ? 1 : 0},
      };
    }
    return out;
  }

  ParseOutcome parse_rule(std::size_t ri) {
    reset_state();
    ++invocations;
    Scope sc;
    sc.rule = static_cast<std::uint32_t>(ri);
    sc.has_actions = g.info(ri).has_actions;
    if (g.uses_ctx_args()) sc.ctx_saved = ctx_args;
    push_scope(std::move(sc));
    std::uint32_t k = cont(CK::RuleExit, ExprId{}, static_cast<std::uint32_t>(ri), k_done);
    Result r = run(g.rules()[ri].body, k, Args{});
    return finish(r);
  }

  ParseOutcome parse_expr(ExprId e) {
    reset_state();
    Result r = run(e, k_done, Args{});
    return finish(r);
  }
};

Session::Session(const Grammar& g, const InputSource& input, EngineOptions opts, IncrementalHooks* hooks)
    : impl_(std::make_unique<Impl>(g, opts, hooks)) {
  impl_->bind_input(input);
}

Session::Session(const Grammar& g, std::vector<Item> input, EngineOptions opts)
    : impl_(std::make_unique<Impl>(g, opts, nullptr)) {
  set_input(std::move(input));
}

Session::~Session() = default;

void Session::set_input(std::vector<Item> input) {
  impl_->owned = std::make_unique<VectorInput>(std::move(input));
  impl_->bind_input(*impl_->owned);
}

void Session::set_input(const InputSource& input) {
  impl_->owned.reset();
  impl_->bind_input(input);
}

ParseOutcome Session::parse(std::string_view start) {
  const Grammar& g = impl_->g;
  std::optional<std::size_t> ri = start.empty() ? g.find_rule(g.start()) : g.find_rule(start);
  if (!ri) throw Error(ErrorCode::UnknownRule, "start rule '" + std::string(start) + "' is not defined");
  return impl_->parse_rule(*ri);
}

ParseOutcome Session::match_expr(ExprId e) { return impl_->parse_expr(e); }

std::vector<std::string> Session::memo_keys() const {
  std::vector<std::string> out;
  impl_->memo.for_each([&](const MemoKey& k, const MemoVal& v) {
    out.push_back(dump_expr(impl_->pool, v.e, true) + " | " + impl_->print_cont(v.k) + " @" + std::to_string(k.pos) +
                  " stops=" + std::to_string(k.stops));
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Session::continuation_count() const { return impl_->conts.size(); }

const EngineOptions& Session::options() const { return impl_->opts; }

ParseOutcome parse(const Grammar& g, const std::vector<Item>& input, std::string_view start, EngineOptions opts) {
  Session s(g, input, opts);
  return s.parse(start);
}

ParseOutcome parse(const Grammar& g, std::string_view utf8_input, std::string_view start, EngineOptions opts) {
  return parse(g, items_from_utf8(utf8_input), start, opts);
}

}  // namespace regreg
