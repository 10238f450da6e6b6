#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "regreg/engine.hpp"
#include "regreg/grammar.hpp"
#include "regreg/value.hpp"

namespace regreg {

struct DynCell;

// Stable handle to one item of an EditBuffer, or to the end-of-input slot.
// Stays valid across edits; a deleted item resolves to where it used to be.
class Marker {
 public:
  Marker() = default;
  bool valid() const { return cell_ != nullptr; }
  friend bool operator==(const Marker&, const Marker&) = default;

 private:
  friend class EditBuffer;
  explicit Marker(DynCell* c) : cell_(c) {}
  DynCell* cell_ = nullptr;
};

struct ReparseStats {
  std::size_t hits = 0;
  std::size_t misses = 0;  // nested expressions recomputed
  std::size_t stores = 0;
  std::size_t stale = 0;    // entries found but rejected by timestamp validation
  std::size_t entries = 0;  // live entries after the parse
};

// One stored memo entry, for inspection in tests and tools.
struct MemoInfo {
  std::size_t index = 0;  // current position of the entry's start item
  std::string expr;       // dump of the nested expression
  bool success = false;
  std::size_t advance = 0;
  std::size_t read_extent = 0;  // items read from the start, exclusive
  std::uint64_t saved = 0;
};

struct ReparseResult {
  ParseOutcome outcome;
  ReparseStats stats;
};

// Editable item sequence that re-parses incrementally. Memoization of nested
// expressions is owned by the buffer: each entry remembers how far right its
// computation read and the newest edit timestamp in that interval, and is
// reused only while that timestamp is unchanged.
class EditBuffer {
 public:
  static constexpr std::size_t kRunCapacity = 64;

  // Throws ContextualArgsUnsupported for grammars that use contextual arguments.
  explicit EditBuffer(const Grammar& g, std::string_view utf8_text = {}, EngineOptions opts = {});
  EditBuffer(const Grammar& g, const std::vector<Item>& items, EngineOptions opts = {});
  ~EditBuffer();
  EditBuffer(const EditBuffer&) = delete;
  EditBuffer& operator=(const EditBuffer&) = delete;

  // User interface. Positions are 0-based; IndexOutOfRange on bad positions.
  std::size_t size() const;
  Item chr(std::size_t p) const;
  void ins(std::size_t p, Item item);
  void ins(std::size_t p, char32_t c) { ins(p, Item::scalar(c)); }
  void del(std::size_t p);
  ReparseResult reparse(std::string_view start = {});

  std::vector<Item> items() const;
  std::string text() const;

  // Parser interface.
  Marker rindex(std::size_t n) const;  // n == size() gives the end marker
  std::size_t index(Marker m) const;
  Item char_at(Marker m) const;
  Marker next(Marker m) const;  // the end marker is its own successor
  bool at_end(Marker m) const;
  std::uint64_t timestamp_range(Marker from, Marker to) const;  // max edit timestamp, inclusive

  std::uint64_t epoch() const;
  std::size_t memo_entries() const;
  std::size_t run_count() const;
  std::size_t tombstone_count() const;
  std::vector<MemoInfo> memo_snapshot() const;  // ordered by index

  // When set, every memo hit is recomputed and compared (EngineBug on mismatch).
  void set_verify(bool on);

  // Recomputes the tree bookkeeping bottom-up and compares; empty on success.
  std::string check_invariants() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace regreg
