#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace regreg {

inline constexpr char32_t kMaxScalar = 0x10FFFF;

struct CharRange {
  char32_t lo;
  char32_t hi;  // inclusive

  friend bool operator==(const CharRange&, const CharRange&) = default;
  friend auto operator<=>(const CharRange&, const CharRange&) = default;
};

// A set of scalar values: sorted, disjoint, non-adjacent ranges, optionally
// complemented. Construction always canonicalizes.
class CharClassSet {
 public:
  CharClassSet() = default;

  static CharClassSet single(char32_t c);
  static CharClassSet range(char32_t lo, char32_t hi);
  static CharClassSet from_ranges(std::vector<CharRange> ranges, bool negated = false);
  static CharClassSet all();  // every scalar

  bool contains(char32_t c) const;
  bool negated() const { return negated_; }
  const std::vector<CharRange>& ranges() const { return ranges_; }

  bool matches_nothing() const { return !negated_ && ranges_.empty(); }
  std::optional<char32_t> single_char() const;

  // Same membership, expressed without the negation flag.
  CharClassSet positive() const;
  CharClassSet complement() const;
  CharClassSet intersect(const CharClassSet& other) const;
  CharClassSet unite(const CharClassSet& other) const;
  bool disjoint(const CharClassSet& other) const { return intersect(other).matches_nothing_resolved(); }

  bool is_canonical() const;
  std::size_t hash() const;
  std::string to_string() const;  // DSL form, e.g. <a-z> or <^"\\>

  friend bool operator==(const CharClassSet&, const CharClassSet&) = default;

 private:
  bool matches_nothing_resolved() const { return positive().ranges_.empty(); }

  std::vector<CharRange> ranges_;
  bool negated_ = false;
};

}  // namespace regreg
