#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "regreg/charclass.hpp"
#include "regreg/expr.hpp"
#include "regreg/grammar.hpp"
#include "regreg/value.hpp"

namespace regreg {

// Finite automaton over-approximating the strings an expression can consume.
struct RegexApprox {
  struct Edge {
    enum class Label : std::uint8_t { Epsilon, Set, Any };
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    Label label = Label::Epsilon;
    CharClassSet set;
  };

  std::uint32_t states = 0;
  std::vector<Edge> edges;
  std::uint32_t start = 0;
  std::vector<std::uint32_t> accepting;

  std::uint32_t add_state() { return states++; }
  void add_eps(std::uint32_t a, std::uint32_t b) { edges.push_back({a, b, Edge::Label::Epsilon, {}}); }
  void add_set(std::uint32_t a, std::uint32_t b, CharClassSet s) {
    edges.push_back({a, b, Edge::Label::Set, std::move(s)});
  }
  void add_any(std::uint32_t a, std::uint32_t b) { edges.push_back({a, b, Edge::Label::Any, {}}); }

  bool accepts(const std::vector<Item>& input) const;
  bool accepts(std::string_view utf8) const;
};

bool is_empty_lang(const RegexApprox& r);
// Product automaton; accepts the intersection of both languages.
RegexApprox intersect(const RegexApprox& a, const RegexApprox& b);
// Accepts L·Σ*.
RegexApprox extend_right(const RegexApprox& r);

struct FirstInfo {
  CharClassSet first;
  bool nullable = false;
  bool any = false;  // may begin with an item no character class describes

  bool may_start_with(const Item& it) const {
    return any || (it.is_scalar() && first.contains(it.as_scalar()));
  }
  friend bool operator==(const FirstInfo&, const FirstInfo&) = default;
};

struct SizeBounds {
  static constexpr std::size_t kInfinite = 4096;  // saturation point for both ends

  std::size_t min = 0;
  std::size_t max = 0;

  bool max_infinite() const { return max >= kInfinite; }
  bool min_infinite() const { return min >= kInfinite; }
  friend bool operator==(const SizeBounds&, const SizeBounds&) = default;
};

// Static analyses over one finalized (or at least reference-checked) grammar.
// Results are cached; the grammar must outlive the analyzer.
class Analyzer {
 public:
  explicit Analyzer(const Grammar& g);
  ~Analyzer();
  Analyzer(const Analyzer&) = delete;
  Analyzer& operator=(const Analyzer&) = delete;

  const Grammar& grammar() const { return g_; }

  RegexApprox approx(ExprId e);
  bool overlap(ExprId a, ExprId b);
  // Exact with respect to approx(e).
  FirstInfo first_items(ExprId e);
  // Cheaper syntactic over-approximation of first_items, solved with the
  // dataflow solver; the engine consults it to skip hopeless alternatives.
  const FirstInfo& quick_first(ExprId e);
  SizeBounds size_bounds(ExprId e);
  std::vector<std::string> check_nested_progress();

 private:
  struct Impl;
  const Grammar& g_;
  std::unique_ptr<Impl> impl_;
};

struct RuleReport {
  std::string name;
  SizeBounds bounds;
  bool nullable = false;
  bool empty_language = false;
  std::string first;
};

struct ChoiceSite {
  std::string rule;
  std::vector<std::string> alternatives;
  bool disjoint = false;       // no two alternatives overlap
  bool deterministic = false;  // first items pairwise disjoint and none nullable
};

struct AnalysisReport {
  std::vector<RuleReport> rules;
  std::vector<ChoiceSite> choices;
  std::vector<std::string> warnings;
};

AnalysisReport analyze(const Grammar& g);
std::string format_report(const AnalysisReport& r);

}  // namespace regreg
