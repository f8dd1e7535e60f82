#include <doctest.h>

#include <fstream>
#include <sstream>

#include "refiner/core/text.hpp"
#include "refiner/engine/dataset.hpp"
#include "support.hpp"

using namespace refiner;
using namespace refiner::testing;

namespace {

std::vector<std::pair<std::string, Strategy>> hand_labels() {
  std::ifstream in(REFINER_FIXTURES "/le_basics/leb_complete_labels.tsv");
  std::vector<std::pair<std::string, Strategy>> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    out.emplace_back(line.substr(0, tab), strategy_from_string(line.substr(tab + 1)));
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("commit manifest parsing") {
  auto m = parse_commit_manifest(R"({"a.v": ["x", "y"], "b.v": []})");
  CHECK(m["a.v"] == std::set<std::string>{"x", "y"});
  CHECK(m["b.v"].empty());
  CHECK_THROWS(parse_commit_manifest("[1, 2]"));
}

TEST_CASE("leb_complete replay matches the hand labels") {
  GlobalContext g = le_basics();
  auto commits = parse_commit_manifest(slurp(REFINER_FIXTURES "/le_basics/commits.json"));
  auto prover = mock_prover(REFINER_FIXTURES "/le_basics/prover.json");
  auto proofs = collect_sources(REFINER_FIXTURES "/le_basics");
  auto rows = replay_dataset(g, proofs, commits, prover, 10);

  std::vector<DatasetRow> leb;
  for (const auto& r : rows)
    if (r.theorem == "leb_complete") leb.push_back(r);
  auto expected = hand_labels();
  REQUIRE(leb.size() == expected.size());
  for (std::size_t i = 0; i < leb.size(); ++i) {
    CHECK(leb[i].tactic == expected[i].first);
    CHECK(leb[i].example.label == expected[i].second);
  }
  for (const auto& r : rows) {
    CHECK(r.example.features.f3 <= r.example.features.f1);
    CHECK(r.example.features.f4 <= r.example.features.f1);
  }

  // Before "apply O_le_n." the goal is O <= m: le via the notation.
  CHECK(leb[3].example.features.f1 == 1);
}

TEST_CASE("empty proofs give a header-only dataset") {
  GlobalContext g = le_basics();
  MockProver prover(MockScenario{});
  auto rows = replay_dataset(g, {}, {}, prover, 10);
  CHECK(rows.empty());
  std::ostringstream out;
  write_dataset(out, {});
  CHECK(out.str() == "f1,f2,f3,f4,f5,f6,label\n");
}
