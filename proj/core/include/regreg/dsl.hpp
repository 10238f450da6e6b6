#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "regreg/actions.hpp"
#include "regreg/errors.hpp"
#include "regreg/expr.hpp"
#include "regreg/grammar.hpp"

namespace regreg {

struct RuleDecl {
  std::string name;
  std::vector<std::string> params;  // non-empty for templates
  SourceSpan span;                  // whole definition
  std::string body_text;            // template bodies are kept as source
  ExprId body;                      // invalid for templates; they are inlined at call sites
};

struct GrammarDoc {
  std::shared_ptr<ExprPool> pool;
  std::vector<RuleDecl> rules;
  std::string start;
  bool explicit_start = false;

  // Non-template rules as an unfinalized Grammar sharing this pool.
  Grammar to_grammar(std::shared_ptr<const ActionRegistry> actions = ActionRegistry::standard()) const;
};

// Throws Error with SyntaxError (always carrying a span), UnknownRule,
// DuplicateRule or UnknownActionHandle.
GrammarDoc parse_grammar(std::string_view text,
                         std::shared_ptr<const ActionRegistry> actions = ActionRegistry::standard(),
                         std::shared_ptr<ExprPool> pool = nullptr);

std::string print_grammar(const GrammarDoc& doc);

// Prints one expression in DSL syntax. Throws InvalidArgument for shapes the
// DSL cannot produce.
std::string print_expr(const ExprPool& pool, ExprId e);

// parse_grammar + to_grammar + finalize.
Grammar load_grammar(std::string_view text,
                     std::shared_ptr<const ActionRegistry> actions = ActionRegistry::standard());

}  // namespace regreg
