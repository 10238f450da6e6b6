#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "regreg/dynbuf.hpp"
#include "regreg/engine.hpp"
#include "regreg/generate.hpp"

namespace regreg::cli {

enum class Format { Text, Json };

struct CliConfig {
  std::string command;
  std::string grammar_path;
  std::string input_path;
  bool use_stdin = false;
  std::string start;
  EngineOptions engine;
  Format format = Format::Text;
  std::uint64_t seed = 0;
  bool verify = false;

  std::size_t grammars = 500;  // check
  std::size_t max_len = 8;     // check
  std::string script_path;     // replay
};

// Exit codes shared by every command.
inline constexpr int kAccept = 0;
inline constexpr int kReject = 1;
inline constexpr int kUsage = 2;

// ---- check ----

struct CheckOptions {
  std::uint64_t seed = 0;
  std::size_t grammars = 500;
  std::string alphabet = "abc";
  std::size_t max_len = 8;
  EngineOptions engine;
  gen::GenOptions gen;
  gen::ProbeOptions probe;
  bool shrink = true;
  bool stop_at_first = true;
};

struct Mismatch {
  std::size_t grammar_index = 0;
  std::string grammar;  // DSL text
  std::string input;
  std::string engine;  // rendered outcomes
  std::string oracle;
  std::string shrunk_grammar;
  std::string shrunk_input;
};

struct CheckReport {
  std::uint64_t seed = 0;
  std::size_t grammars = 0;
  std::size_t inputs_per_grammar = 0;
  std::size_t compared = 0;
  std::size_t agreed = 0;
  std::size_t cap_skipped = 0;
  std::size_t accepted = 0;  // cases where both sides succeeded
  std::size_t resampled = 0;
  double seconds = 0;
  std::optional<Mismatch> mismatch;

  bool ok() const { return !mismatch && agreed == compared; }
};

CheckReport run_check(const CheckOptions& opts);
std::string render_outcome(const ParseOutcome& o);
nlohmann::json to_json(const CheckReport& r);

// ---- bench ----

struct BenchRow {
  std::string series;  // "memo", "memo-off" or "trivial"
  std::size_t n = 0;
  std::int64_t invocations = 0;
  std::int64_t peak_memo = 0;
  std::int64_t memo_entries = 0;
  double seconds = 0;
  std::optional<double> ratio;  // invocations relative to the previous row of the series
};

struct BenchOptions {
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::vector<std::size_t> memo_off_sizes{64, 128};
  double ratio_lo = 1.8;
  double ratio_hi = 2.5;
  double memo_off_min_ratio = 8.0;
  EngineOptions engine;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  bool linear_ok = true;
  bool memo_off_ok = true;
  bool trivial_ok = true;  // 'a'* costs n + c with c independent of n
  std::int64_t trivial_overhead = 0;
  double seconds = 0;

  bool ok() const { return linear_ok && memo_off_ok && trivial_ok; }
};

extern const char* const kPathologicalGrammar;

BenchReport run_bench(const BenchOptions& opts);
nlohmann::json to_json(const BenchReport& r);

// ---- replay ----

struct ScriptLine {
  enum class Kind { Ins, Del, Parse, Expect };
  Kind kind = Kind::Parse;
  std::size_t pos = 0;
  char32_t ch = 0;
  bool accept = false;           // expect
  std::optional<std::size_t> end;  // expect
  std::size_t line = 0;
};

// Throws Error(SyntaxError) with a line number on malformed scripts.
std::vector<ScriptLine> parse_script(const std::string& text);

struct ReplayParse {
  std::size_t line = 0;
  bool success = false;
  bool whole = false;  // matched the entire buffer
  std::size_t end = 0;
  std::size_t size = 0;
  ReparseStats stats;
  double recompute_ratio = 0;  // misses / entries live before this parse
  std::optional<bool> batch_agrees;
};

struct ReplayReport {
  std::vector<ReplayParse> parses;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

ReplayReport run_replay(const Grammar& g, const std::string& initial, const std::vector<ScriptLine>& script,
                        const std::string& start, const EngineOptions& opts, bool verify);
nlohmann::json to_json(const ReplayReport& r);

// ---- commands ----

nlohmann::json value_to_json(const Value& v);

int cmd_parse(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_analyze(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_replay(const CliConfig& cfg, std::ostream& out, std::ostream& err);

// Full argument handling; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace regreg::cli
