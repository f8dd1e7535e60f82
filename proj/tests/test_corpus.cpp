#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "bm25_oracle.hpp"
#include "refiner/corpus/global_context.hpp"

using namespace refiner;
using namespace refiner::testing;

namespace {

const char* const kLebCorrect =
    "Theorem leb_correct : forall n m, n <= m -> leb n m = true.";

GlobalContext le_basics() {
  return GlobalContext::ingest(collect_sources(REFINER_FIXTURES "/le_basics"));
}

std::vector<std::string> names_of(const std::vector<const ContextItem*>& items) {
  std::vector<std::string> out;
  for (const auto* i : items) out.push_back(i->name);
  return out;
}

}  // namespace

TEST_CASE("ingesting the motivating file") {
  auto g = le_basics();
  CHECK(g.named_count() == 6);
  CHECK(g.notation_count() == 2);
  CHECK(g.ordered().size() == 8);
  CHECK(g.skipped().empty());

  std::vector<std::string> order;
  for (const auto& i : g.ordered()) order.push_back(i.name);
  CHECK(order == std::vector<std::string>{"nat", "n + 1", "leb", "le", "n <= m", "O_le_n",
                                          "n_le_m_Sn_le_Sm", "leb_complete"});
  CHECK(g.find("nat")->kind == ItemKind::Inductive);
  CHECK(g.find("leb")->kind == ItemKind::Fixpoint);
  CHECK(g.find("leb_complete")->kind == ItemKind::Theorem);
  CHECK(g.find("n + 1") == nullptr);  // notations are not named items

  const ContextItem* lc = g.find("leb_complete");
  REQUIRE(lc->proof.has_value());
  CHECK(lc->proof->rfind("Proof.", 0) == 0);
  CHECK(lc->proof->find("(* Use lemma *)") != std::string::npos);
  CHECK(lc->proof->substr(lc->proof->size() - 4) == "Qed.");
  CHECK(lc->statement == "Theorem leb_complete : forall n m, leb n m = true -> n <= m.");
  for (std::size_t i = 0; i < g.ordered().size(); ++i) CHECK(g.ordered()[i].origin.ordinal == i);

  auto map = g.notation_map();
  CHECK(map == std::map<std::string, std::string>{{"+ 1", "S"}, {"<=", "le"}});
}

TEST_CASE("ingest edge cases") {
  CHECK(GlobalContext::ingest({}).ordered().empty());

  auto only = GlobalContext::ingest({{"n.v", "Notation \"x ++ y\" := (app x y)."}});
  CHECK(only.named_count() == 0);
  CHECK(only.notation_map().size() == 1);
  CHECK(only.notation_map().at("++") == "app");

  auto adm = GlobalContext::ingest(
      {{"a.v", "Lemma a : True. Proof. Admitted.\nLemma b : True. Proof. exact I. Qed."}});
  CHECK_FALSE(adm.find("a")->proof.has_value());
  CHECK(adm.find("b")->proof == std::optional<std::string>("Proof. exact I. Qed."));

  auto bad = GlobalContext::ingest({{"b.v", "Lemma : True.\nRequire Import Arith.\nLemma ok : True."}});
  CHECK(bad.named_count() == 1);
  REQUIRE(bad.skipped().size() == 1);
  CHECK(bad.skipped()[0].find("unparsable") != std::string::npos);

  try {
    GlobalContext::ingest({{"x.v", "Lemma a : True."}, {"y.v", "Definition a := 1.\nLemma c : True.\nLemma c : False."}});
    FAIL("expected DuplicateName");
  } catch (const DuplicateName& e) {
    CHECK(e.names() == std::vector<std::string>{"a", "c"});
  }
}

TEST_CASE("ingestion is idempotent and snapshots round-trip") {
  auto a = le_basics();
  auto b = le_basics();
  CHECK(a == b);
  auto path = std::filesystem::temp_directory_path() / "refiner_snapshot_test.json";
  a.save(path);
  auto c = GlobalContext::load(path);
  CHECK(c == a);
  CHECK(c.notation_map() == a.notation_map());
  CHECK(names_of(c.bm25_top_k(kLebCorrect, 3)) == names_of(a.bm25_top_k(kLebCorrect, 3)));
  std::filesystem::remove(path);
  CHECK_THROWS(GlobalContext::load(path));
}

TEST_CASE("bm25 ranking over the motivating file") {
  auto g = le_basics();
  CHECK(names_of(g.bm25_top_k(kLebCorrect, 2)) ==
        std::vector<std::string>{"leb_complete", "n_le_m_Sn_le_Sm"});
  CHECK(g.bm25_top_k(kLebCorrect, 0).empty());
  CHECK(g.bm25_top_k(kLebCorrect, 10).size() == 3);
  // The queried theorem never retrieves itself.
  auto self = g.bm25_top_k(g.find("leb_complete")->statement, 10);
  CHECK(std::none_of(self.begin(), self.end(),
                     [](const ContextItem* i) { return i->name == "leb_complete"; }));

  auto one = GlobalContext::ingest({{"o.v", "Lemma only : True."}});
  CHECK(names_of(one.bm25_top_k("Lemma q : False.", 5)) == std::vector<std::string>{"only"});
}

TEST_CASE("most similar proof") {
  auto g = le_basics();
  auto sim = g.most_similar_proof(kLebCorrect);
  REQUIRE(sim.has_value());
  CHECK(sim->name == "leb_complete");
  CHECK(sim->proof == *g.find("leb_complete")->proof);
  CHECK(sim->score > 0);

  auto none = GlobalContext::ingest({{"a.v", "Lemma a : True.\nLemma b : True. Proof. Admitted."}});
  CHECK_FALSE(none.most_similar_proof("Lemma q : True.").has_value());

  // An exact statement copy of a proved lemma wins.
  auto exact = g.most_similar_proof("Lemma copy : forall n, O <= n.");
  REQUIRE(exact.has_value());
  CHECK(exact->name == "O_le_n");
  CHECK(g.most_similar_proof(kLebCorrect, "leb_complete")->name != "leb_complete");
}

TEST_CASE("keyword search") {
  auto g = le_basics();
  auto hits = names_of(g.keyword_search({"le", "leb"}));
  CHECK(hits == std::vector<std::string>{"leb_complete", "O_le_n", "le", "leb", "n_le_m_Sn_le_Sm"});
  CHECK(g.keyword_search({}).empty());
  CHECK(g.keyword_search({"zorn"}).empty());
  CHECK(names_of(g.keyword_search({"LEB"})) == names_of(g.keyword_search({"leb"})));
}

TEST_CASE("definitions mentioned in a text") {
  auto g = le_basics();
  CHECK(names_of(g.definitions_in("forall n m, leb n m = true -> n <= m")) ==
        std::vector<std::string>{"le", "leb"});
  CHECK(g.definitions_in("").empty());
  CHECK(names_of(g.definitions_in("leb (n + 1) (m + 1) = true")) ==
        std::vector<std::string>{"leb", "nat"});
  CHECK(names_of(g.definitions_in("x : nat")) == std::vector<std::string>{"nat"});
}

TEST_CASE("prefix and filtering") {
  auto g = le_basics();
  auto before = g.prefix_before("n_le_m_Sn_le_Sm");
  CHECK(before.named_count() == 4);
  CHECK(before.notation_count() == 2);
  CHECK_FALSE(before.contains("leb_complete"));
  CHECK_THROWS_AS(g.prefix_before("nope"), std::invalid_argument);
  auto no_lemmas = g.filtered([](const ContextItem& i) { return !is_provable(i.kind); });
  CHECK(no_lemmas.bm25_top_k(kLebCorrect, 5).empty());
}

TEST_CASE("retrieval properties on random corpora") {
  std::mt19937_64 rng(20251016);
  const std::vector<std::string> vocab = {"n",   "m",    "le",  "leb",  "nat", "true", "S",
                                          "O",   "plus", "mult", "list", "app", "rev",  "In",
                                          "x'",  "p_q",  "Zero", "len", "map", "0"};
  const std::vector<std::string> glue = {" ", " -> ", " = ", ", ", " <= ", " (", ") "};
  auto pick = [&](const auto& v) { return v[rng() % v.size()]; };

  for (int round = 0; round < 100; ++round) {
    std::size_t count = 1 + rng() % 50;
    std::vector<ContextItem> items;
    std::vector<OracleDoc> docs;
    if (rng() % 2) items.push_back({"n <= m", ItemKind::Notation, "Notation \"n <= m\" := (le n m).", {}, {}});
    for (std::size_t i = 0; i < count; ++i) {
      ContextItem item;
      // Few distinct names per prefix so ties on score are common.
      item.name = "t" + std::to_string(i);
      std::uint64_t roll = rng() % 4;
      item.kind = roll == 0 ? ItemKind::Definition : (roll == 1 ? ItemKind::Theorem : ItemKind::Lemma);
      std::string body;
      std::size_t len = 1 + rng() % 8;
      for (std::size_t w = 0; w < len; ++w) body += pick(vocab) + pick(glue);
      std::string kw = item.kind == ItemKind::Definition ? "Definition" : to_string(item.kind);
      item.statement = kw + " " + item.name + " : " + body + ".";
      if (is_provable(item.kind) && rng() % 2) item.proof = "Proof. auto. Qed.";
      item.origin.ordinal = items.size();
      if (is_provable(item.kind)) docs.push_back({item.name, oracle_tokens(item.name + " " + item.statement)});
      items.push_back(item);
    }
    auto g = GlobalContext::from_items(items);

    std::string query;
    std::string self;
    if (rng() % 3 == 0 && !docs.empty()) {
      self = docs[rng() % docs.size()].name;
      query = g.find(self)->statement;
    } else {
      std::size_t len = 1 + rng() % 6;
      for (std::size_t w = 0; w < len; ++w) query += pick(vocab) + " ";
      query = "Lemma query : " + query + ".";
    }

    for (std::size_t k = 0; k <= docs.size() + 1; ++k) {
      auto got = names_of(g.bm25_top_k(query, k));
      if (!docs.empty()) {
        REQUIRE(got == oracle_top_k(docs, self, query, k));
      } else {
        REQUIRE(got.empty());
      }
      auto next = names_of(g.bm25_top_k(query, k + 1));
      REQUIRE(std::equal(got.begin(), got.end(), next.begin()));
    }

    // keyword search results equal the union of single-keyword searches.
    std::vector<std::string> kws = {pick(vocab), pick(vocab), pick(vocab)};
    auto all = names_of(g.keyword_search(kws));
    std::set<std::string> joined;
    for (const auto& k : kws)
      for (auto& n : names_of(g.keyword_search({k}))) joined.insert(n);
    CHECK(std::set<std::string>(all.begin(), all.end()) == joined);
    CHECK(all.size() == joined.size());

    for (const auto* d : g.definitions_in(query)) CHECK(is_definitional(d->kind));
  }
}
