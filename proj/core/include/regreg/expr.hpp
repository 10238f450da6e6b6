#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "regreg/charclass.hpp"

namespace regreg {

struct ExprId {
  std::uint32_t v = 0;

  explicit operator bool() const { return v != 0; }
  friend bool operator==(ExprId, ExprId) = default;
  friend auto operator<=>(ExprId, ExprId) = default;
};

struct ExprIdHash {
  std::size_t operator()(ExprId e) const noexcept { return std::hash<std::uint32_t>{}(e.v); }
};

using Symbol = std::uint32_t;

// Stop ids fold into 64 bits. Sets are reset on every Many entry and rule
// call, so two ids sharing a bit never meet in one live set.
using StopSet = std::uint64_t;
inline StopSet stop_bit(std::uint32_t id) { return StopSet{1} << (id % 64); }

inline constexpr std::uint32_t kBreakStop = 0;

enum class Kind : std::uint8_t {
  CharSet,
  Seq,
  Switch,  // kids: head, on_success, on_fail
  Many,
  Stop,
  RuleRef,
  Nested,  // kids: start, mid, end
  Act,
  Bind,
  Enter,  // kids: outer, inner
  Success,
  Fail,
  Empty,
  AnyItem,
};

std::string_view to_string(Kind k);

struct ExprNode {
  Kind kind = Kind::Empty;
  bool eager = false;          // Many built as a lazy iteration
  std::uint32_t payload = 0;   // charset index, stop id or Symbol
  StopSet stops = 0;           // stop ids reachable without crossing Many or RuleRef
  std::array<ExprId, 3> kids{};

  int arity() const;
};

// Hash-consing arena for expressions. Every constructor returns the unique id
// of the simplified node, so ids compare equal iff structures do.
class ExprPool {
 public:
  ExprPool();
  ExprPool(const ExprPool&) = delete;
  ExprPool& operator=(const ExprPool&) = delete;

  ExprId success() const { return success_; }
  ExprId fail() const { return fail_; }
  ExprId empty() const { return empty_; }
  ExprId any_item() const { return any_; }

  ExprId mk_charset(const CharClassSet& spec);
  ExprId mk_seq(ExprId head, ExprId tail);
  ExprId mk_seq(const std::vector<ExprId>& parts);
  ExprId mk_switch(ExprId head, ExprId on_success, ExprId on_fail);
  ExprId mk_choice(const std::vector<ExprId>& alts);
  ExprId mk_not(ExprId e);
  ExprId mk_and(ExprId e);
  ExprId mk_many(ExprId body, bool eager = false);
  ExprId mk_many_raw(ExprId body, bool eager);  // body already carries its stops
  ExprId mk_stop(std::uint32_t id);
  ExprId mk_nested(ExprId start, ExprId mid, ExprId end);
  ExprId mk_rule_ref(std::string_view name);
  ExprId mk_rule_ref(Symbol name);
  ExprId mk_act(std::string_view handle);
  ExprId mk_act(Symbol handle);
  ExprId mk_bind(std::string_view name, ExprId e);
  ExprId mk_bind(Symbol name, ExprId e);
  ExprId mk_enter(ExprId outer, ExprId inner);

  ExprId literal(std::u32string_view text);
  ExprId literal(std::string_view utf8_text);

  // `prefix break tail | rest`: once prefix matches, rest is never tried.
  ExprId commit(ExprId prefix, ExprId tail, ExprId rest);

  const ExprNode& node(ExprId e) const { return nodes_[e.v]; }
  Kind kind(ExprId e) const { return nodes_[e.v].kind; }
  const CharClassSet& charset(ExprId e) const { return charsets_[nodes_[e.v].payload]; }
  std::size_t size() const { return nodes_.size(); }

  Symbol intern(std::string_view name);
  std::optional<Symbol> lookup(std::string_view name) const;
  const std::string& name(Symbol s) const { return symbols_[s]; }

  std::uint32_t fresh_stop_id() { return next_stop_++; }
  std::string fresh_name(std::string_view base);

  // Bottom-up rewrite through the smart constructors. `fn` sees each node
  // after its children were rewritten and may return a replacement.
  ExprId transform(ExprId e, const std::function<std::optional<ExprId>(ExprId)>& fn);

  // Recognizers for the derived encodings.
  struct Lookahead {
    bool negative;
    ExprId body;
  };
  std::optional<Lookahead> as_lookahead(ExprId e) const;
  struct Commit {
    ExprId prefix;
    ExprId tail;
    ExprId rest;
  };
  std::optional<Commit> as_commit(ExprId e) const;
  bool is_choice(ExprId e) const;

 private:
  struct Key {
    Kind kind;
    bool eager;
    std::uint32_t payload;
    std::array<ExprId, 3> kids;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct ManyKeyHash {
    std::size_t operator()(const std::pair<ExprId, bool>& k) const noexcept {
      return ExprIdHash{}(k.first) * 2 + k.second;
    }
  };

  ExprId intern_node(Kind kind, std::uint32_t payload, std::array<ExprId, 3> kids, bool eager = false);
  StopSet compute_stops(Kind kind, std::uint32_t payload, const std::array<ExprId, 3>& kids) const;

  std::vector<ExprNode> nodes_;
  std::unordered_map<Key, ExprId, KeyHash> index_;
  std::vector<CharClassSet> charsets_;
  std::unordered_map<std::size_t, std::vector<std::uint32_t>> charset_index_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> symbol_index_;
  std::unordered_map<std::pair<ExprId, bool>, ExprId, ManyKeyHash> many_memo_;
  std::uint32_t next_stop_ = 1;
  std::uint32_t next_fresh_ = 1;
  ExprId success_, fail_, empty_, any_;
};

// Structural S-expression dump, stable across pools. With `forget`, actions
// and bindings are stripped the same way memo keys strip them.
std::string dump_expr(const ExprPool& pool, ExprId e, bool forget = false);

}  // namespace regreg
