#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regreg/errors.hpp"
#include "regreg/expr.hpp"
#include "regreg/grammar.hpp"
#include "regreg/value.hpp"

namespace regreg {

enum class MemoPolicy { Always, Never, Threshold };

struct EngineOptions {
  MemoPolicy memo = MemoPolicy::Always;
  std::size_t threshold = 512;  // self-cost in match invocations, for MemoPolicy::Threshold
  bool evict = true;
  bool prune = false;  // fail early when the remaining input is shorter than the minimal match
  bool stats = true;
  std::size_t max_invocations = 0;  // 0 means unbounded; otherwise BudgetExceeded
  bool inject_fault = false;        // deliberately wrong matcher, for exercising differential checks

  // "always", "never" or "threshold:K". Throws InvalidArgument.
  void set_memo(std::string_view spec);
};

using Stats = std::map<std::string, std::int64_t>;
using CtxReturns = std::vector<std::pair<std::string, Value>>;

struct ParseOutcome {
  bool success = false;
  std::size_t end = 0;  // end of the match; 0 when the parse failed
  Value value;
  CtxReturns ctx_returns;
  Stats stats;

  // Text payloads of the "log" contextual returns, in emission order.
  std::vector<std::string> log() const;
};

class InputSource {
 public:
  virtual ~InputSource() = default;
  virtual std::size_t size() const = 0;
  virtual const Item& at(std::size_t i) const = 0;
  // Non-null when items are stored contiguously; enables the fast path.
  virtual const Item* data() const { return nullptr; }
};

class VectorInput final : public InputSource {
 public:
  VectorInput() = default;
  explicit VectorInput(std::vector<Item> items) : items_(std::move(items)) {}
  std::size_t size() const override { return items_.size(); }
  const Item& at(std::size_t i) const override { return items_[i]; }
  const Item* data() const override { return items_.data(); }
  const std::vector<Item>& items() const { return items_; }

 private:
  std::vector<Item> items_;
};

// Result of one nested expression at one position, as replayed on a hit.
struct NestedMemoEntry {
  bool success = false;
  std::size_t start = 0;
  std::size_t end = 0;
  Value value;
  std::vector<Value> children;
  CtxReturns ctx_returns;
};

// Lets an incremental buffer own memoization of nested expressions and see
// every input read. With hooks installed the engine's own tables are off.
class IncrementalHooks {
 public:
  virtual ~IncrementalHooks() = default;
  virtual void on_read(std::size_t pos) = 0;  // pos == size() is the end-of-input probe
  virtual std::optional<NestedMemoEntry> get_memo(ExprId nested, std::size_t pos) = 0;
  virtual void set_memo(ExprId nested, std::size_t pos, const NestedMemoEntry& entry) = 0;
  // When true every hit is recomputed and compared; mismatches throw EngineBug.
  virtual bool verify_hits() const { return false; }
};

// One parser instance over one input. Memo tables survive across parse()
// calls until the input changes.
class Session {
 public:
  Session(const Grammar& g, const InputSource& input, EngineOptions opts = {}, IncrementalHooks* hooks = nullptr);
  Session(const Grammar& g, std::vector<Item> input, EngineOptions opts = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void set_input(std::vector<Item> input);
  void set_input(const InputSource& input);

  // Parses from `start` (default: the grammar's start rule) with an empty
  // continuation; success does not require consuming the whole input.
  ParseOutcome parse(std::string_view start = {});
  ParseOutcome match_expr(ExprId e);

  // Live state-memo keys rendered with actions and bindings forgotten.
  std::vector<std::string> memo_keys() const;
  std::size_t continuation_count() const;
  const EngineOptions& options() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ParseOutcome parse(const Grammar& g, const std::vector<Item>& input, std::string_view start = {},
                   EngineOptions opts = {});
ParseOutcome parse(const Grammar& g, std::string_view utf8_input, std::string_view start = {},
                   EngineOptions opts = {});

}  // namespace regreg
