#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace regreg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "regreg");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string grammar(const char* name) { return std::string(REGREG_GRAMMAR_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content) {
  fs::path dir = fs::temp_directory_path() / "regreg_cli_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

}  // namespace

TEST_CASE("parse prints the calculator result") {
  std::string in = temp_file("calc.txt", "2-4+2*2--2\n");
  Run r = run({"parse", "--grammar", grammar("calculator.peg"), "--input", in});
  CHECK(r.code == cli::kAccept);
  CHECK(r.out.rfind("4\naccept", 0) == 0);
}

TEST_CASE("parse rejects and reports the end") {
  std::string in = temp_file("bad.txt", "2-");
  Run r = run({"parse", "--grammar", grammar("calculator.peg"), "--input", in});
  CHECK(r.code == cli::kReject);
  CHECK(r.out.find("reject") != std::string::npos);
}

TEST_CASE("parse as json") {
  std::string in = temp_file("hello.txt", "hello world");
  Run r = run({"parse", "--grammar", grammar("hello.peg"), "--input", in, "--format", "json"});
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["command"] == "parse");
  CHECK(j["size"] == 11);
  CHECK((r.code == cli::kAccept) == (j["status"] == "accept"));
  CHECK(j["stats"].contains("invocations"));
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"parse"}).code == cli::kUsage);
  CHECK(run({"parse", "--grammar", "/nonexistent.peg", "--input", "/nonexistent"}).code == cli::kUsage);
  CHECK(run({"parse", "--grammar", grammar("hello.peg"), "--memo", "sometimes", "--stdin"}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  std::string bad = temp_file("bad.peg", "s = 'a\n");
  std::string in = temp_file("a.txt", "a");
  Run r = run({"parse", "--grammar", bad, "--input", in});
  CHECK(r.code == cli::kUsage);
  CHECK_FALSE(r.err.empty());
  CHECK(run({"--help"}).code == cli::kAccept);
}

TEST_CASE("analyze reports minimal sizes") {
  Run r = run({"analyze", "--grammar", grammar("sizes.peg"), "--format", "json"});
  REQUIRE(r.code == cli::kAccept);
  auto j = nlohmann::json::parse(r.out);
  bool seen = false;
  for (const auto& rule : j["rules"]) {
    if (rule["name"] == "foobar") {
      seen = true;
      CHECK(rule["min"] == 6);
    }
  }
  CHECK(seen);
  Run text = run({"analyze", "--grammar", grammar("sizes.peg")});
  CHECK(text.out.find("choice") != std::string::npos);
}

TEST_CASE("check agrees on a small run") {
  Run r = run({"check", "--seed", "3", "--grammars", "20", "--max-len", "5", "--format", "json"});
  CHECK(r.code == cli::kAccept);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["compared"] == j["agreed"]);
  CHECK(j["grammars"] == 20);
}

TEST_CASE("check catches an injected fault") {
  Run r = run({"check", "--seed", "0", "--grammars", "100", "--max-len", "6", "--inject-fault"});
  CHECK(r.code == cli::kReject);
  CHECK(r.out.find("MISMATCH") != std::string::npos);
  CHECK(r.out.find("minimal counterexample") != std::string::npos);
}

TEST_CASE("replay runs a script with expectations") {
  std::string script = temp_file("edit.txt",
                                 "parse\nexpect accept\n"
                                 "ins 1 0   # [10]\nparse\nexpect accept 4\n"
                                 "ins 0 x\nparse\nexpect reject\n");
  std::string in = temp_file("doc.json", "[1]");
  Run r = run({"replay", "--grammar", grammar("json.peg"), "--input", in, "--script", script, "--verify"});
  CHECK(r.code == cli::kAccept);
  CHECK(r.out.find("batch=ok") != std::string::npos);

  std::string wrong = temp_file("wrong.txt", "parse\nexpect reject\n");
  CHECK(run({"replay", "--grammar", grammar("json.peg"), "--input", in, "--script", wrong}).code == cli::kReject);

  std::string oob = temp_file("oob.txt", "del 9\nparse\n");
  Run o = run({"replay", "--grammar", grammar("json.peg"), "--input", in, "--script", oob});
  CHECK(o.code == cli::kReject);
  CHECK(o.out.find("line 1") != std::string::npos);

  std::string malformed = temp_file("malformed.txt", "parse\nins x y\n");
  Run m = run({"replay", "--grammar", grammar("json.peg"), "--input", in, "--script", malformed});
  CHECK(m.code == cli::kUsage);
  CHECK(m.err.find("line 2") != std::string::npos);
}

TEST_CASE("replay as json") {
  std::string script = temp_file("twice.txt", "parse\nparse\n");
  std::string in = temp_file("doc2.json", "{\"k\": [1, 2, 3]}");
  Run r = run({"replay", "--grammar", grammar("json.peg"), "--input", in, "--script", script, "--format", "json"});
  REQUIRE(r.code == cli::kAccept);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["parses"].size() == 2);
  CHECK(j["parses"][1]["misses"] == 0);
  CHECK(j["parses"][1]["recompute_ratio"] == 0.0);
}

TEST_CASE("script parsing") {
  auto lines = cli::parse_script("# comment\nins 0 U+41\n\ndel 3\nparse\nexpect accept 7\n");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].kind == cli::ScriptLine::Kind::Ins);
  CHECK(lines[0].ch == U'A');
  CHECK(lines[0].line == 2);
  CHECK(lines[1].pos == 3);
  CHECK(lines[3].end == std::optional<std::size_t>(7));
  CHECK(rt::error_of([] { cli::parse_script("ins -1 a"); }) == ErrorCode::SyntaxError);
  CHECK(rt::error_of([] { cli::parse_script("expect maybe"); }) == ErrorCode::SyntaxError);
}
