#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regreg/grammar.hpp"

namespace regreg::gen {

using Rng = std::mt19937_64;

// Small grammar AST used only for generating and shrinking test grammars.
struct Node {
  enum class K { Lit, Class, Any, Empty, Seq, Alt, Star, LazyStar, Plus, Opt, Not, And, Ref, Nested, Log };
  K k = K::Empty;
  std::string text;  // literal char, class body, rule name or log tag
  std::vector<Node> kids;
};

struct RuleDef {
  std::string name;
  bool nested = false;  // body is nested('a', kids[0], 'c')
  Node body;            // for nested rules, the mid expression
};

struct GenGrammar {
  std::vector<RuleDef> rules;  // rules[0] is the start rule

  std::string text() const;
  Grammar build() const;  // parse + finalize
};

struct GenOptions {
  std::size_t max_rules = 5;
  int max_depth = 4;
  std::size_t max_nested_rules = 2;
  bool actions = false;      // sprinkle {@log_*} actions
  double action_rate = 0.2;  // per sequence slot
};

// Grammars in the structured class: general rules reference only later
// general rules or nested rules, nested rules are delimited by 'a' ... 'c'
// and consume 'b' plus balanced nested segments in between, and iteration
// bodies cannot match empty.
GenGrammar random_structured_grammar(Rng& rng, const GenOptions& opts = {});

// Same distribution, resampled until the brute-force oracle stays under
// probe_steps on each of `probes` random inputs of length probe_len over
// {a,b,c}. Keeps exhaustive differential runs within a time budget.
struct ProbeOptions {
  std::size_t probe_steps = 20000;
  int probes = 32;
  std::size_t probe_len = 8;
};
GenGrammar random_checkable_grammar(Rng& rng, const GenOptions& opts = {}, const ProbeOptions& probe = {},
                                    std::size_t* resampled = nullptr);

std::vector<std::string> all_strings(std::string_view alphabet, std::size_t max_len);
std::string random_string(Rng& rng, std::string_view alphabet, std::size_t max_len);

// Returns true while the pair still exhibits the failure being shrunk.
using FailPredicate = std::function<bool(const GenGrammar&, const std::string&)>;
std::pair<GenGrammar, std::string> shrink(GenGrammar g, std::string input, const FailPredicate& fails,
                                          std::size_t max_rounds = 500);

// JSON-like text of roughly target_bytes, valid for grammars/json.peg.
std::string random_json(Rng& rng, std::size_t target_bytes);

struct EditOp {
  enum class Kind { Ins, Del, Parse };
  Kind kind = Kind::Parse;
  std::size_t pos = 0;
  char32_t ch = 0;
};

// Positions are valid for a buffer that starts at initial_len items.
std::vector<EditOp> random_edit_script(Rng& rng, std::size_t initial_len, std::size_t ops, double p_ins = 0.45,
                                       double p_del = 0.45);
std::string format_script(const std::vector<EditOp>& ops);

}  // namespace regreg::gen
