#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "refiner/core/serialize.hpp"
#include "refiner/engine/engine.hpp"

using namespace refiner;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with the given arguments, capturing stdout.
Run cli(const std::string& args) {
  std::string cmd = std::string(REFINER_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("refiner_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::vector<std::string> lines_of(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

const std::string kFix = REFINER_FIXTURES;

std::string snapshot(const TempDir& t) {
  std::string snap = t / "snap.json";
  REQUIRE(cli("ingest " + kFix + "/le_basics/Le.v " + kFix + "/leb_correct/LebCorrect.v --out " + snap).status == 0);
  return snap;
}

}  // namespace

TEST_CASE("ingest reports counts and exit status") {
  TempDir t;
  Run r = cli("ingest " + kFix + "/le_basics --out " + (t / "s.json"));
  CHECK(r.status == 0);
  CHECK(r.out.find("6 named items, 2 notations") != std::string::npos);
  CHECK(fs::exists(t / "s.json"));

  fs::create_directories(t.path / "empty");
  r = cli("ingest " + (t / "empty"));
  CHECK(r.status == 0);
  CHECK(r.out.find("0 named items") != std::string::npos);

  CHECK(cli("ingest " + (t / "missing.v")).status == 2);

  std::ofstream(t / "dup.v") << "Lemma a : True.\nProof. auto. Qed.\nLemma a : True.\nProof. auto. Qed.\n";
  CHECK(cli("ingest " + (t / "dup.v")).status == 2);
}

TEST_CASE("prove: proved, unknown and exhausted") {
  TempDir t;
  std::string snap = snapshot(t);
  std::string cfg = " --config " + kFix + "/leb_correct/config.json";

  Run r = cli("prove leb_correct --snapshot " + snap + cfg + " --out " + (t / "p.jsonl"));
  CHECK(r.status == 0);
  auto lines = lines_of(t / "p.jsonl");
  REQUIRE(lines.size() == 1);
  auto trace = trace_from_line(lines[0]);
  CHECK(trace.outcome == Outcome::Proved);
  CHECK(trace.totals.iterations_used == 1);

  CHECK(cli("prove no_such_lemma --snapshot " + snap + cfg).status == 1);

  // Without lemma discovery the leb_correct run cannot succeed.
  r = cli("prove leb_correct --snapshot " + snap + " --config " + kFix +
          "/batch/config.json --disable-lemma-discovery --out " + (t / "x.jsonl"));
  CHECK(r.status == 1);
  lines = lines_of(t / "x.jsonl");
  REQUIRE(lines.size() == 1);
  CHECK(trace_from_line(lines[0]).outcome != Outcome::Proved);
}

TEST_CASE("configuration errors exit with 2") {
  TempDir t;
  std::string snap = snapshot(t);
  CHECK(cli("prove leb_correct --snapshot " + (t / "none.json")).status == 2);
  std::ofstream(t / "bad.json") << R"({"iteration_limt": 3})";
  CHECK(cli("prove leb_correct --snapshot " + snap + " --config " + (t / "bad.json")).status == 2);
  CHECK(cli("prove leb_correct --snapshot " + snap + " --config " + kFix +
            "/leb_correct/config.json --mode Sideways")
            .status == 2);
  CHECK(cli("frobnicate").status == 2);
}

TEST_CASE("batch summary, determinism and report") {
  TempDir t;
  std::string snap = snapshot(t);
  std::string base = "batch --snapshot " + snap + " --config " + kFix + "/batch/config.json --theorems " +
                     kFix + "/batch/theorems.txt";
  Run one = cli(base + " --jobs 1 --out " + (t / "one.jsonl"));
  Run four = cli(base + " --jobs 4 --out " + (t / "four.jsonl"));
  REQUIRE(one.status == 0);
  REQUIRE(four.status == 0);
  CHECK(lines_of(t / "one.jsonl") == lines_of(t / "four.jsonl"));

  auto summary = nlohmann::json::parse(one.out);
  CHECK(summary["proved"] == 2);
  CHECK(summary["total"] == 3);

  // The summary recomputes from the trace file.
  std::vector<RefinementTrace> traces;
  for (const auto& l : lines_of(t / "one.jsonl")) traces.push_back(trace_from_line(l));
  REQUIRE(traces.size() == 3);
  CHECK(to_json(summarize(traces)) == summary);
  CHECK(traces[2].outcome == Outcome::Exhausted);

  Run empty = cli("batch --snapshot " + snap + " --config " + kFix + "/batch/config.json --out " +
                  (t / "e.jsonl"));
  auto es = nlohmann::json::parse(empty.out);
  CHECK(es["proved"] == 0);
  CHECK(es["total"] == 0);

  Run rep = cli("report " + (t / "one.jsonl") + " --plot-dir " + (t / "plots"));
  REQUIRE(rep.status == 0);
  auto report = nlohmann::json::parse(rep.out);
  double prev = -1;
  for (const auto& row : report["iterations"]) {
    double s = row["cumulative_success"].get<double>();
    CHECK(s >= prev);
    prev = s;
    if (row["decisions"].get<int>() > 0) {
      double sum = 0;
      for (const auto& [k, v] : row["strategy_percent"].items()) sum += v.get<double>();
      CHECK(sum == doctest::Approx(100.0));
    }
  }
  CHECK(prev == doctest::Approx(200.0 / 3));
  CHECK(fs::exists(t.path / "plots" / "cumulative_success.tsv"));
}

TEST_CASE("features export") {
  TempDir t;
  std::string snap = t / "le_basics.json";
  REQUIRE(cli("ingest " + kFix + "/le_basics --out " + snap).status == 0);
  std::ofstream(t / "cfg.json") << R"({"prover_backend": "mock", "mock_scenario": ")" << kFix
                                << R"(/le_basics/prover.json"})";
  Run r = cli("features --snapshot " + snap + " --proofs " + kFix + "/le_basics --commits " + kFix +
              "/le_basics/commits.json --config " + (t / "cfg.json") + " --out " + (t / "d.csv"));
  CHECK(r.status == 0);
  auto rows = lines_of(t / "d.csv");
  REQUIRE(!rows.empty());
  CHECK(rows[0] == "f1,f2,f3,f4,f5,f6,label");
  CHECK(std::count_if(rows.begin(), rows.end(), [](const std::string& l) {
          return l.find("LemmaDiscovery") != std::string::npos;
        }) == 1);

  fs::create_directories(t.path / "none");
  r = cli("features --snapshot " + snap + " --proofs " + (t / "none") + " --config " + (t / "cfg.json") +
          " --out " + (t / "h.csv"));
  CHECK(r.status == 0);
  CHECK(lines_of(t / "h.csv") == std::vector<std::string>{"f1,f2,f3,f4,f5,f6,label"});
}
