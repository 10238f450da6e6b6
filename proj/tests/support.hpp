#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "regreg/dsl.hpp"
#include "regreg/engine.hpp"
#include "regreg/errors.hpp"
#include "regreg/oracle.hpp"

namespace rt {

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

inline std::string grammar_file(std::string_view name) {
  return slurp(std::string(REGREG_GRAMMAR_DIR) + "/" + std::string(name));
}

// Reference-checked but not finalized: left recursion is kept as written.
inline regreg::Grammar raw_grammar(std::string_view text) {
  regreg::Grammar g = regreg::parse_grammar(text).to_grammar();
  g.check_references();
  return g;
}

template <class F>
std::optional<regreg::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const regreg::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline bool whole(const regreg::ParseOutcome& o, std::size_t n) { return o.success && o.end == n; }
inline bool whole(const regreg::OracleOutcome& o, std::size_t n) { return o.success && o.end == n; }

}  // namespace rt
