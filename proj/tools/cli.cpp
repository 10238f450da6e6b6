#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "regreg/analysis.hpp"
#include "regreg/dsl.hpp"
#include "regreg/dynbuf.hpp"
#include "regreg/errors.hpp"
#include "regreg/oracle.hpp"

namespace regreg::cli {

using json = nlohmann::json;

const char* const kPathologicalGrammar = "s = (((('a')* 'b' | 'a')* 'c' | 'a')* 'd' | 'a')* 'e'\n";

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_logger_mt("regreg");
    l->set_pattern("[%l] %v");
    const char* env = std::getenv("REGREG_LOG");
    l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return l;
  }();
  return log;
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(f), {});
}

// Input files usually end with a newline that is not part of the document.
std::string strip_final_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string describe(const Error& e, const std::string& path) {
  if (e.has_span()) return fmt::format("{}:{}:{}: {}", path, e.span().line, e.span().col, e.what());
  return fmt::format("{}: {}", path, e.what());
}

Grammar load_grammar_file(const std::string& path) {
  if (path.empty()) throw UsageError("--grammar is required");
  auto text = slurp(path);
  if (!text) throw UsageError("cannot read grammar file '" + path + "'");
  try {
    Grammar g = load_grammar(*text);
    logger()->debug("loaded {} rules from {}", g.rule_count(), path);
    return g;
  } catch (const Error& e) {
    throw UsageError(describe(e, path));
  }
}

std::string read_input(const CliConfig& cfg) {
  if (cfg.use_stdin) {
    std::string s(std::istreambuf_iterator<char>(std::cin), {});
    return strip_final_newline(std::move(s));
  }
  if (cfg.input_path.empty()) throw UsageError("one of --input or --stdin is required");
  auto text = slurp(cfg.input_path);
  if (!text) throw UsageError("cannot read input file '" + cfg.input_path + "'");
  return strip_final_newline(std::move(*text));
}

json stats_json(const Stats& s) {
  json j = json::object();
  for (const auto& [k, v] : s) j[k] = v;
  return j;
}

json bounds_max(const SizeBounds& b) { return b.max_infinite() ? json(nullptr) : json(b.max); }

bool same(const ParseOutcome& e, const OracleOutcome& o) {
  if (e.success != o.success) return false;
  return !e.success || (e.end == o.end && e.value == o.value);
}

std::string render_oracle(const OracleOutcome& o) {
  if (!o.success) return "reject";
  return fmt::format("accept end={} value={}", o.end, o.value.print());
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "regreg: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "regreg: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace

std::string render_outcome(const ParseOutcome& o) {
  if (!o.success) return "reject";
  return fmt::format("accept end={} value={}", o.end, o.value.print());
}

json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Nil: return nullptr;
    case Value::Kind::Atom: return json{{"atom", print_item(v.item())}};
    case Value::Kind::Text: return json{{"text", v.text()}, {"span", {v.span().start, v.span().end}}};
    case Value::Kind::List: {
      json arr = json::array();
      for (const auto& e : v.elems()) arr.push_back(value_to_json(e));
      return arr;
    }
    case Value::Kind::Node: {
      json kids = json::array();
      for (const auto& e : v.children()) kids.push_back(value_to_json(e));
      return json{{"rule", v.rule()}, {"span", {v.span().start, v.span().end}}, {"children", kids}};
    }
    case Value::Kind::Host:
      if (auto n = v.as_int()) return json{{"number", *n}};
      return json{{"host", v.print()}};
  }
  return nullptr;
}

// ---- check ----

CheckReport run_check(const CheckOptions& opts) {
  auto t0 = Clock::now();
  CheckReport rep;
  rep.seed = opts.seed;
  gen::Rng rng(opts.seed);
  std::vector<std::string> strings = gen::all_strings(opts.alphabet, opts.max_len);
  std::vector<std::vector<Item>> inputs;
  inputs.reserve(strings.size());
  for (const auto& s : strings) inputs.push_back(items_from_utf8(s));
  rep.inputs_per_grammar = inputs.size();

  EngineOptions eo = opts.engine;
  eo.stats = false;

  for (std::size_t gi = 0; gi < opts.grammars; ++gi) {
    gen::GenGrammar gg = gen::random_checkable_grammar(rng, opts.gen, opts.probe, &rep.resampled);
    Grammar g = gg.build();
    Session ses(g, std::vector<Item>{}, eo);
    ++rep.grammars;
    for (std::size_t ii = 0; ii < inputs.size(); ++ii) {
      OracleOutcome o = oracle_parse(g, inputs[ii]);
      if (o.cap_hit) {
        ++rep.cap_skipped;
        continue;
      }
      ses.set_input(inputs[ii]);
      ParseOutcome e = ses.parse();
      ++rep.compared;
      if (same(e, o)) {
        ++rep.agreed;
        rep.accepted += e.success;
        continue;
      }
      logger()->info("mismatch in grammar {} on '{}'", gi, strings[ii]);
      if (!rep.mismatch) {
        Mismatch m;
        m.grammar_index = gi;
        m.grammar = gg.text();
        m.input = strings[ii];
        m.engine = render_outcome(e);
        m.oracle = render_oracle(o);
        if (opts.shrink) {
          auto fails = [&](const gen::GenGrammar& cg, const std::string& in) {
            Grammar sg = cg.build();
            OracleOutcome so = oracle_parse(sg, in);
            if (so.cap_hit) return false;
            return !same(parse(sg, in, {}, eo), so);
          };
          auto [sg, si] = gen::shrink(gg, strings[ii], fails);
          m.shrunk_grammar = sg.text();
          m.shrunk_input = si;
        }
        rep.mismatch = std::move(m);
      }
      if (opts.stop_at_first) break;
    }
    logger()->debug("grammar {} done, {} cases compared so far", gi, rep.compared);
    if (rep.mismatch && opts.stop_at_first) break;
  }
  rep.seconds = since(t0);
  return rep;
}

json to_json(const CheckReport& r) {
  json j{{"command", "check"},
         {"seed", r.seed},
         {"grammars", r.grammars},
         {"inputs_per_grammar", r.inputs_per_grammar},
         {"compared", r.compared},
         {"agreed", r.agreed},
         {"cap_skipped", r.cap_skipped},
         {"accepted", r.accepted},
         {"resampled", r.resampled},
         {"seconds", r.seconds},
         {"ok", r.ok()},
         {"mismatch", nullptr}};
  if (r.mismatch) {
    const Mismatch& m = *r.mismatch;
    j["mismatch"] = json{{"grammar_index", m.grammar_index}, {"grammar", m.grammar},
                         {"input", m.input},                {"engine", m.engine},
                         {"oracle", m.oracle},              {"shrunk_grammar", m.shrunk_grammar},
                         {"shrunk_input", m.shrunk_input}};
  }
  return j;
}

// ---- bench ----

namespace {

BenchRow measure(const Grammar& g, const std::string& series, std::size_t n, const EngineOptions& eo) {
  auto t0 = Clock::now();
  ParseOutcome o = parse(g, std::string(n, 'a'), {}, eo);
  BenchRow row;
  row.series = series;
  row.n = n;
  row.seconds = since(t0);
  row.invocations = o.stats.at("invocations");
  row.peak_memo = o.stats.at("peak_memo_entries");
  row.memo_entries = o.stats.at("memo_entries");
  return row;
}

void add_ratios(std::vector<BenchRow>& rows, std::size_t from) {
  for (std::size_t i = from + 1; i < rows.size(); ++i) {
    rows[i].ratio = static_cast<double>(rows[i].invocations) / static_cast<double>(rows[i - 1].invocations);
  }
}

}  // namespace

BenchReport run_bench(const BenchOptions& opts) {
  auto t0 = Clock::now();
  BenchReport rep;
  Grammar patho = load_grammar(kPathologicalGrammar);
  EngineOptions eo = opts.engine;
  eo.stats = true;

  std::size_t first = rep.rows.size();
  for (std::size_t n : opts.sizes) rep.rows.push_back(measure(patho, "memo", n, eo));
  add_ratios(rep.rows, first);
  for (std::size_t i = first + 1; i < rep.rows.size(); ++i) {
    double r = *rep.rows[i].ratio;
    if (r < opts.ratio_lo || r > opts.ratio_hi) rep.linear_ok = false;
  }

  EngineOptions off = eo;
  off.memo = MemoPolicy::Never;
  first = rep.rows.size();
  for (std::size_t n : opts.memo_off_sizes) rep.rows.push_back(measure(patho, "memo-off", n, off));
  add_ratios(rep.rows, first);
  for (std::size_t i = first + 1; i < rep.rows.size(); ++i) {
    if (*rep.rows[i].ratio < opts.memo_off_min_ratio) rep.memo_off_ok = false;
  }

  Grammar trivial = load_grammar("s = 'a'*\n");
  first = rep.rows.size();
  for (std::size_t n : opts.sizes) rep.rows.push_back(measure(trivial, "trivial", n, eo));
  add_ratios(rep.rows, first);
  for (std::size_t i = first; i < rep.rows.size(); ++i) {
    std::int64_t over = rep.rows[i].invocations - static_cast<std::int64_t>(rep.rows[i].n);
    if (i == first) rep.trivial_overhead = over;
    if (over != rep.trivial_overhead) rep.trivial_ok = false;
  }
  rep.seconds = since(t0);
  return rep;
}

json to_json(const BenchReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"series", row.series},
                        {"n", row.n},
                        {"invocations", row.invocations},
                        {"peak_memo_entries", row.peak_memo},
                        {"memo_entries", row.memo_entries},
                        {"seconds", row.seconds},
                        {"ratio", row.ratio ? json(*row.ratio) : json(nullptr)}});
  }
  return json{{"command", "bench"},      {"rows", rows},
              {"linear_ok", r.linear_ok}, {"memo_off_ok", r.memo_off_ok},
              {"trivial_ok", r.trivial_ok}, {"trivial_overhead", r.trivial_overhead},
              {"seconds", r.seconds},      {"ok", r.ok()}};
}

// ---- replay ----

namespace {

char32_t parse_char(const std::string& tok, std::size_t line) {
  if (tok.size() > 2 && (tok[0] == 'U' || tok[0] == 'u') && tok[1] == '+') {
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(tok.substr(2), &used, 16);
      if (used == tok.size() - 2 && v <= 0x10FFFF && !(v >= 0xD800 && v <= 0xDFFF)) return static_cast<char32_t>(v);
    } catch (const std::exception&) {
    }
  } else {
    std::vector<Item> it = items_from_utf8(tok);
    if (it.size() == 1) return it[0].as_scalar();
  }
  throw Error(ErrorCode::SyntaxError, fmt::format("line {}: bad character '{}'", line, tok));
}

std::size_t parse_pos(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  try {
    unsigned long long v = std::stoull(tok, &used, 10);
    if (used == tok.size() && tok[0] != '-') return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::SyntaxError, fmt::format("line {}: bad position '{}'", line, tok));
}

}  // namespace

std::vector<ScriptLine> parse_script(const std::string& text) {
  std::vector<ScriptLine> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) {
      if (t[0] == '#') break;
      toks.push_back(t);
    }
    if (toks.empty()) continue;
    ScriptLine sl;
    sl.line = lineno;
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (toks.size() < lo || toks.size() > hi) {
        throw Error(ErrorCode::SyntaxError, fmt::format("line {}: wrong number of arguments to '{}'", lineno, toks[0]));
      }
    };
    if (toks[0] == "ins") {
      arity(3, 3);
      sl.kind = ScriptLine::Kind::Ins;
      sl.pos = parse_pos(toks[1], lineno);
      sl.ch = parse_char(toks[2], lineno);
    } else if (toks[0] == "del") {
      arity(2, 2);
      sl.kind = ScriptLine::Kind::Del;
      sl.pos = parse_pos(toks[1], lineno);
    } else if (toks[0] == "parse") {
      arity(1, 1);
      sl.kind = ScriptLine::Kind::Parse;
    } else if (toks[0] == "expect") {
      arity(2, 3);
      sl.kind = ScriptLine::Kind::Expect;
      if (toks[1] == "accept") {
        sl.accept = true;
      } else if (toks[1] != "reject") {
        throw Error(ErrorCode::SyntaxError, fmt::format("line {}: expected 'accept' or 'reject'", lineno));
      }
      if (toks.size() == 3) sl.end = parse_pos(toks[2], lineno);
    } else {
      throw Error(ErrorCode::SyntaxError, fmt::format("line {}: unknown command '{}'", lineno, toks[0]));
    }
    out.push_back(sl);
  }
  return out;
}

ReplayReport run_replay(const Grammar& g, const std::string& initial, const std::vector<ScriptLine>& script,
                        const std::string& start, const EngineOptions& opts, bool verify) {
  ReplayReport rep;
  EditBuffer buf(g, initial, opts);
  for (const ScriptLine& sl : script) {
    try {
      switch (sl.kind) {
        case ScriptLine::Kind::Ins: buf.ins(sl.pos, sl.ch); break;
        case ScriptLine::Kind::Del: buf.del(sl.pos); break;
        case ScriptLine::Kind::Parse: {
          std::size_t before = buf.memo_entries();
          ReparseResult r = buf.reparse(start);
          ReplayParse p;
          p.line = sl.line;
          p.success = r.outcome.success;
          p.end = r.outcome.end;
          p.size = buf.size();
          p.whole = p.success && p.end == p.size;
          p.stats = r.stats;
          p.recompute_ratio =
              before ? static_cast<double>(r.stats.misses) / static_cast<double>(before) : (r.stats.misses ? 1.0 : 0.0);
          if (verify) {
            ParseOutcome batch = parse(g, buf.items(), start, opts);
            p.batch_agrees = batch.success == r.outcome.success &&
                             (!batch.success || (batch.end == r.outcome.end && batch.value == r.outcome.value));
            if (!*p.batch_agrees) {
              rep.failures.push_back(fmt::format("line {}: incremental {} but batch {}", sl.line,
                                                 render_outcome(r.outcome), render_outcome(batch)));
            }
          }
          logger()->debug("line {}: {} hits={} misses={} stale={}", sl.line, render_outcome(r.outcome), r.stats.hits,
                          r.stats.misses, r.stats.stale);
          rep.parses.push_back(p);
          break;
        }
        case ScriptLine::Kind::Expect: {
          if (rep.parses.empty()) {
            rep.failures.push_back(fmt::format("line {}: expect before any parse", sl.line));
            break;
          }
          const ReplayParse& last = rep.parses.back();
          bool ok = last.whole == sl.accept && (!sl.end || *sl.end == last.end);
          if (!ok) {
            rep.failures.push_back(fmt::format("line {}: expected {}{}, got {} end={}", sl.line,
                                               sl.accept ? "accept" : "reject",
                                               sl.end ? fmt::format(" {}", *sl.end) : std::string(),
                                               last.whole ? "accept" : "reject", last.end));
          }
          break;
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IndexOutOfRange) throw;
      rep.failures.push_back(fmt::format("line {}: {}", sl.line, e.what()));
    }
  }
  return rep;
}

json to_json(const ReplayReport& r) {
  json parses = json::array();
  for (const auto& p : r.parses) {
    parses.push_back(json{{"line", p.line},
                          {"accept", p.whole},
                          {"success", p.success},
                          {"end", p.end},
                          {"size", p.size},
                          {"hits", p.stats.hits},
                          {"misses", p.stats.misses},
                          {"stores", p.stats.stores},
                          {"stale", p.stats.stale},
                          {"entries", p.stats.entries},
                          {"recompute_ratio", p.recompute_ratio},
                          {"batch_agrees", p.batch_agrees ? json(*p.batch_agrees) : json(nullptr)}});
  }
  return json{{"command", "replay"}, {"parses", parses}, {"failures", r.failures}, {"ok", r.ok()}};
}

// ---- commands ----

int cmd_parse(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Grammar g = load_grammar_file(cfg.grammar_path);
    std::string input = read_input(cfg);
    std::vector<Item> items = items_from_utf8(input);
    auto t0 = Clock::now();
    ParseOutcome o = parse(g, items, cfg.start, cfg.engine);
    double secs = since(t0);
    bool accept = o.success && o.end == items.size();
    if (cfg.format == Format::Json) {
      json j{{"command", "parse"},
             {"status", accept ? "accept" : "reject"},
             {"matched", o.success},
             {"end", o.end},
             {"size", items.size()},
             {"value", value_to_json(o.value)},
             {"value_text", o.value.print()},
             {"seconds", secs},
             {"stats", stats_json(o.stats)}};
      out << j.dump(2) << "\n";
    } else {
      if (accept) out << o.value.print() << "\n";
      out << (accept ? "accept" : "reject") << " end=" << o.end << " size=" << items.size() << "\n";
      if (!accept && o.success) out << "(the start rule matched only a prefix)\n";
      for (const auto& [k, v] : o.stats) out << "  " << k << " = " << v << "\n";
    }
    return accept ? kAccept : kReject;
  });
}

int cmd_analyze(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Grammar g = load_grammar_file(cfg.grammar_path);
    AnalysisReport r = analyze(g);
    if (cfg.format == Format::Json) {
      json rules = json::array();
      for (const auto& rr : r.rules) {
        rules.push_back(json{{"name", rr.name},
                             {"min", rr.bounds.min_infinite() ? json(nullptr) : json(rr.bounds.min)},
                             {"max", bounds_max(rr.bounds)},
                             {"nullable", rr.nullable},
                             {"empty_language", rr.empty_language},
                             {"first", rr.first}});
      }
      json choices = json::array();
      for (const auto& c : r.choices) {
        choices.push_back(json{{"rule", c.rule},
                               {"alternatives", c.alternatives},
                               {"disjoint", c.disjoint},
                               {"deterministic", c.deterministic}});
      }
      out << json{{"command", "analyze"}, {"rules", rules}, {"choices", choices}, {"warnings", r.warnings}}.dump(2)
          << "\n";
    } else {
      out << format_report(r);
    }
    return kAccept;
  });
}

int cmd_check(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CheckOptions co;
    co.seed = cfg.seed;
    co.grammars = cfg.grammars;
    co.max_len = cfg.max_len;
    co.engine = cfg.engine;
    CheckReport r = run_check(co);
    if (cfg.format == Format::Json) {
      out << to_json(r).dump(2) << "\n";
    } else {
      out << fmt::format(
          "check seed={} grammars={} inputs/grammar={} compared={} agreed={} cap_skipped={} resampled={} "
          "time={:.1f}s\n",
          r.seed, r.grammars, r.inputs_per_grammar, r.compared, r.agreed, r.cap_skipped, r.resampled, r.seconds);
      if (r.mismatch) {
        const Mismatch& m = *r.mismatch;
        out << "MISMATCH in grammar #" << m.grammar_index << " on input '" << m.input << "'\n"
            << m.grammar << "  engine: " << m.engine << "\n  oracle: " << m.oracle << "\n";
        if (!m.shrunk_grammar.empty()) {
          out << "minimal counterexample on input '" << m.shrunk_input << "':\n" << m.shrunk_grammar;
        }
      }
      out << (r.ok() ? "PASS" : "FAIL") << "\n";
    }
    return r.ok() ? kAccept : kReject;
  });
}

int cmd_bench(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    BenchOptions bo;
    bo.engine = cfg.engine;
    BenchReport r = run_bench(bo);
    if (cfg.format == Format::Json) {
      out << to_json(r).dump(2) << "\n";
    } else {
      out << fmt::format("{:<9} {:>6} {:>12} {:>10} {:>10} {:>8} {:>9}\n", "series", "n", "invocations", "peak_memo",
                         "memo", "ratio", "seconds");
      for (const auto& row : r.rows) {
        out << fmt::format("{:<9} {:>6} {:>12} {:>10} {:>10} {:>8} {:>9.4f}\n", row.series, row.n, row.invocations,
                           row.peak_memo, row.memo_entries, row.ratio ? fmt::format("{:.3f}", *row.ratio) : "-",
                           row.seconds);
      }
      out << "linearity " << (r.linear_ok ? "PASS" : "FAIL") << ", memo-off superlinear "
          << (r.memo_off_ok ? "PASS" : "FAIL") << ", 'a'* = n+" << r.trivial_overhead << " "
          << (r.trivial_ok ? "PASS" : "FAIL") << "\n";
    }
    return r.ok() ? kAccept : kReject;
  });
}

int cmd_replay(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Grammar g = load_grammar_file(cfg.grammar_path);
    if (cfg.script_path.empty()) throw UsageError("--script is required");
    auto script_text = slurp(cfg.script_path);
    if (!script_text) throw UsageError("cannot read script '" + cfg.script_path + "'");
    std::vector<ScriptLine> script;
    try {
      script = parse_script(*script_text);
    } catch (const Error& e) {
      throw UsageError(cfg.script_path + ": " + e.what());
    }
    std::string initial;
    if (cfg.use_stdin || !cfg.input_path.empty()) initial = read_input(cfg);
    ReplayReport r = run_replay(g, initial, script, cfg.start, cfg.engine, cfg.verify);
    if (cfg.format == Format::Json) {
      out << to_json(r).dump(2) << "\n";
    } else {
      for (const auto& p : r.parses) {
        out << fmt::format("line {:>4}: {} end={} size={} hits={} misses={} stale={} entries={} recompute={:.2f}%{}\n",
                           p.line, p.whole ? "accept" : "reject", p.end, p.size, p.stats.hits, p.stats.misses,
                           p.stats.stale, p.stats.entries, 100.0 * p.recompute_ratio,
                           p.batch_agrees ? (*p.batch_agrees ? " batch=ok" : " batch=DIFF") : "");
      }
      for (const auto& f : r.failures) out << "FAIL " << f << "\n";
      out << (r.ok() ? "PASS" : "FAIL") << "\n";
    }
    return r.ok() ? kAccept : kReject;
  });
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"regreg: memoizing continuation-passing parser toolkit"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::string memo = "always", evict = "on", prune = "off", format = "text";
  bool inject_fault = false;

  auto common = [&](CLI::App* sub, bool grammar, bool input) {
    if (grammar) sub->add_option("--grammar", cfg.grammar_path, "Grammar file")->required();
    if (input) {
      auto* in = sub->add_option("--input", cfg.input_path, "Input file");
      auto* st = sub->add_flag("--stdin", cfg.use_stdin, "Read input from standard input");
      in->excludes(st);
    }
    sub->add_option("--start", cfg.start, "Start rule (default: first rule or @start)");
    sub->add_option("--memo", memo, "always, never or threshold:K");
    sub->add_option("--evict", evict, "Memo eviction")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--prune", prune, "Minimal-size depth pruning")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };

  auto* p = app.add_subcommand("parse", "Parse one input");
  common(p, true, true);
  auto* a = app.add_subcommand("analyze", "Static analysis report");
  common(a, true, false);
  auto* c = app.add_subcommand("check", "Differential check of engine against the backtracking oracle");
  common(c, false, false);
  c->add_option("--seed", cfg.seed, "Random seed");
  c->add_option("--grammars", cfg.grammars, "Number of random grammars");
  c->add_option("--max-len", cfg.max_len, "Longest exhaustive input");
  c->add_flag("--inject-fault", inject_fault, "Run a deliberately broken engine (test fixture)");
  auto* b = app.add_subcommand("bench", "Invocation counts on the pathological grammar");
  common(b, false, false);
  auto* r = app.add_subcommand("replay", "Run an edit script against an incremental buffer");
  common(r, true, true);
  r->add_option("--script", cfg.script_path, "Edit script")->required();
  r->add_flag("--verify", cfg.verify, "Compare every parse with a batch parse");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kAccept;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kAccept;
    }
    err << "regreg: " << e.what() << "\n";
    return kUsage;
  }

  try {
    cfg.engine.set_memo(memo);
  } catch (const Error& e) {
    err << "regreg: " << e.what() << "\n";
    return kUsage;
  }
  cfg.engine.evict = evict == "on";
  cfg.engine.prune = prune == "on";
  cfg.engine.inject_fault = inject_fault;
  cfg.format = format == "json" ? Format::Json : Format::Text;

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  logger()->debug("command {}", cfg.command);
  if (cfg.command == "parse") return cmd_parse(cfg, out, err);
  if (cfg.command == "analyze") return cmd_analyze(cfg, out, err);
  if (cfg.command == "check") return cmd_check(cfg, out, err);
  if (cfg.command == "bench") return cmd_bench(cfg, out, err);
  return cmd_replay(cfg, out, err);
}

}  // namespace regreg::cli
