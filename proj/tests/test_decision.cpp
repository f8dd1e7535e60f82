#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "refiner/decision/decision.hpp"

using namespace refiner;

namespace {

GlobalContext le_basics() { return GlobalContext::ingest(collect_sources(REFINER_FIXTURES "/le_basics")); }

// The state in which leb_correct gets stuck before the converse lemma exists.
FailureReport stuck_report() {
  FailureReport r;
  r.erroneous_tactic = "apply n_le_m_Sn_le_Sm in H.";
  r.error_message = "Unable to apply lemma";
  r.partial_proof = "Proof. intros n. induction n. - intros. simpl. reflexivity. - intros. destruct m. + inversion H. +";
  r.stuck_state.goals.push_back({{{"n", "nat"},
                                  {"IHn", "forall m : nat, n <= m -> leb n m = true"},
                                  {"m", "nat"},
                                  {"H", "n + 1 <= m + 1"}},
                                 "leb (n + 1) (m + 1) = true"});
  return r;
}

WorkingContext ctx_with(const GlobalContext& g, std::vector<std::string> lemmas, bool similar) {
  WorkingContext ctx;
  for (const auto& n : lemmas) ctx.add_lemma(*g.find(n));
  if (similar) {
    const ContextItem* lc = g.find("leb_complete");
    ctx.set_similar_proof({lc->name, lc->statement, *lc->proof, 1.5});
  }
  return ctx;
}

}  // namespace

TEST_CASE("parse_decision formats") {
  CHECK(parse_decision("Regeneration") == Decision::regeneration());
  CHECK(parse_decision("Context Enrichment; [le, leb]") == Decision::context_enrichment({"le", "leb"}));
  CHECK(parse_decision("Lemma Discovery; []") == Decision::lemma_discovery({}));
  CHECK(parse_decision("Lemma Discovery; [n_le_m_Sn_le_Sm]") ==
        Decision::lemma_discovery({"n_le_m_Sn_le_Sm"}));
  CHECK(parse_decision("Context Enrichment; []") == Decision::regeneration());
  CHECK_THROWS_AS(parse_decision("I suggest induction"), DecisionParseError);
}

TEST_CASE("parse_decision tolerates prose and decoration") {
  CHECK(parse_decision("The goal needs a converse lemma.\n\n**Strategy: Lemma Discovery; [`n_le_m_Sn_le_Sm`]**\n") ==
        Decision::lemma_discovery({"n_le_m_Sn_le_Sm"}));
  CHECK(parse_decision("Analysis...\n`Context Enrichment; [ le ,leb,  ]`.") ==
        Decision::context_enrichment({"le", "leb"}));
  CHECK(parse_decision("- regeneration") == Decision::regeneration());
  CHECK(parse_decision("3. Regeneration.") == Decision::regeneration());
  CHECK(parse_decision("LEMMA DISCOVERY") == Decision::lemma_discovery({}));
  CHECK(parse_decision("Lemma Discovery; [le_S']") == Decision::lemma_discovery({"le_S'"}));
  // The first matching line wins.
  CHECK(parse_decision("Regeneration\nLemma Discovery; []") == Decision::regeneration());
}

TEST_CASE("parse_decision rejects near misses") {
  for (const char* bad : {"Regenerate", "Regeneration now", "Lemma Discovery [a]",
                          "Lemma Discovery; a, b", "Context Enrichment; [a", "Context Enrichment: [a]",
                          "Lemma Discoveries; []", "Enrichment; [x]", "", "Strategy:",
                          "Lemma Discovery; [[a]]", "Context Enrichment; [a] extra"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_decision(bad), DecisionParseError);
  }
}

TEST_CASE("format and parse round-trip") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> names = {"le", "leb", "O_le_n", "n_le_m_Sn_le_Sm", "x'", "Nat.add"};
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> list;
    for (std::size_t k = rng() % 4; k > 0; --k) list.push_back(names[rng() % names.size()]);
    Decision d = rng() % 3 == 0   ? Decision::lemma_discovery(list)
                 : rng() % 2 == 0 ? Decision::context_enrichment(list)
                                  : Decision::regeneration();
    CHECK(parse_decision(format_decision(d)) == d);
  }
  CHECK(format_decision(Decision::context_enrichment({"le", "leb"})) == "Context Enrichment; [le, leb]");
}

TEST_CASE("features on the stuck state") {
  auto g = le_basics();
  auto ctx = ctx_with(g, {"n_le_m_Sn_le_Sm"}, true);
  auto f = extract_features(g, stuck_report(), ctx);
  CHECK(f.f1 == 2);  // leb, nat
  CHECK(f.f2 == 3);  // nat, le, leb
  CHECK(f.f3 == 0);
  CHECK(f.f4 == 1);  // leb is in no context lemma
  CHECK(f.f5 == doctest::Approx(1.5));
  CHECK(f.f6 == 1);  // O_le_n

  FailureReport empty;
  empty.stuck_state.goals.push_back({});
  auto z = extract_features(g, empty, WorkingContext{});
  CHECK(z == FeatureVector{});
  auto no_sim = extract_features(g, stuck_report(), ctx_with(g, {}, false));
  CHECK(no_sim.f5 == 0.0);
  CHECK(no_sim.f6 == 0);
}

TEST_CASE("labels from human tactics") {
  auto g = GlobalContext::ingest(
      {{"Le.v", collect_sources(REFINER_FIXTURES "/le_basics").front().text},
       {"Conv.v", "Lemma Sn_le_Sm_n_le_m : forall n m, (n + 1) <= (m + 1) -> n <= m.\nProof. Admitted."}});
  std::set<std::string> boundary = {"Sn_le_Sm_n_le_m"};
  CHECK(derive_label("apply Sn_le_Sm_n_le_m in H.", g, boundary) == Strategy::LemmaDiscovery);
  CHECK(derive_label("apply O_le_n.", g, boundary) == Strategy::ContextEnrichment);
  CHECK(derive_label("intros n.", g, boundary) == Strategy::Regeneration);
  // A definition name is not a lemma.
  CHECK(derive_label("unfold leb.", g, boundary) == Strategy::Regeneration);
  CHECK(derive_label("apply (le_S O n IHn).", g, boundary) == Strategy::Regeneration);
}

TEST_CASE("rule-based decisions") {
  auto g = le_basics();
  SUBCASE("missing similar-proof lemma wins") {
    auto d = decide_rule(g, stuck_report(), ctx_with(g, {"n_le_m_Sn_le_Sm"}, true));
    CHECK(d == Decision::context_enrichment({"O_le_n"}));
  }
  SUBCASE("unmentioned goal definition") {
    auto d = decide_rule(g, stuck_report(), ctx_with(g, {"O_le_n", "n_le_m_Sn_le_Sm"}, true));
    CHECK(d == Decision::lemma_discovery({}));
  }
  SUBCASE("both checks pass") {
    auto d = decide_rule(g, stuck_report(), ctx_with(g, {"O_le_n", "n_le_m_Sn_le_Sm", "leb_complete"}, true));
    CHECK(d == Decision::regeneration());
  }
  SUBCASE("disabled branches are skipped") {
    auto ctx = ctx_with(g, {"n_le_m_Sn_le_Sm"}, true);
    CHECK(decide_rule(g, stuck_report(), ctx, {Strategy::LemmaDiscovery, Strategy::Regeneration}) ==
          Decision::lemma_discovery({}));
    CHECK(decide_rule(g, stuck_report(), ctx, {Strategy::Regeneration}) == Decision::regeneration());
  }
  SUBCASE("pure") {
    auto ctx = ctx_with(g, {}, true);
    CHECK(decide_rule(g, stuck_report(), ctx) == decide_rule(g, stuck_report(), ctx));
  }
}

TEST_CASE("random decisions") {
  auto g = le_basics();
  auto seq = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Decision> out;
    for (int i = 0; i < 20; ++i) out.push_back(decide_random(rng, g, stuck_report()));
    return out;
  };
  CHECK(seq(7) == seq(7));
  CHECK(seq(7) != seq(8));

  std::mt19937_64 rng(7);
  std::map<Strategy, int> counts;
  for (int i = 0; i < 3000; ++i) {
    Decision d = decide_random(rng, g, stuck_report());
    ++counts[d.strategy()];
    if (d.strategy() == Strategy::ContextEnrichment)
      CHECK(d.keywords() == std::vector<std::string>{"leb", "nat"});
    if (d.strategy() == Strategy::LemmaDiscovery) CHECK(d.refine_candidates().empty());
  }
  for (auto s : {Strategy::LemmaDiscovery, Strategy::ContextEnrichment, Strategy::Regeneration}) {
    double share = counts[s] / 3000.0;
    CHECK(share > 0.2833);
    CHECK(share < 0.3833);
  }

  for (int i = 0; i < 200; ++i)
    CHECK(decide_random(rng, g, stuck_report(), {Strategy::ContextEnrichment, Strategy::Regeneration})
              .strategy() != Strategy::LemmaDiscovery);
}

TEST_CASE("llm decision maker with reprompt and fallback") {
  auto g = le_basics();
  auto ctx = ctx_with(g, {"n_le_m_Sn_le_Sm"}, true);
  auto report = stuck_report();
  auto scenario = std::make_shared<StubScenario>();
  scenario->add({"iter1/decide", "", "Regeneration", 120, 3});
  scenario->add({"iter2/decide", "", "Lemma Discovery; [n_le_m_Sn_le_Sm]", {}, {}});
  scenario->add({"iter3/decide", "", "hmm", {}, {}});
  scenario->add({"iter3/decide/1", "", "Context Enrichment; [le]", {}, {}});
  scenario->add({"iter4/decide", "", "hmm", {}, {}});
  scenario->add({"iter4/decide/1", "", "still nothing", {}, {}});
  auto gw = std::make_shared<Gateway>(std::make_shared<StubBackend>(scenario), CompletionParams{},
                                      PromptBudgets{});
  LlmDecisionMaker dm(gw);
  DecisionInput in{&g, "Theorem leb_correct : forall n m, n <= m -> leb n m = true.", &report, &ctx, 1, {}};
  in.enabled = {Strategy::LemmaDiscovery, Strategy::ContextEnrichment, Strategy::Regeneration};

  auto r1 = dm.decide(in);
  CHECK(r1.decision == Decision::regeneration());
  CHECK_FALSE(r1.fallback);
  REQUIRE(r1.calls.size() == 1);
  CHECK(r1.calls[0].input_tokens == 120);
  CHECK(r1.calls[0].prompt_text.find("Stuck Proof State:\n" + format_state(report.stuck_state)) !=
        std::string::npos);

  in.iteration = 2;
  CHECK(dm.decide(in).decision == Decision::lemma_discovery({"n_le_m_Sn_le_Sm"}));
  in.iteration = 3;
  auto r3 = dm.decide(in);
  CHECK(r3.decision == Decision::context_enrichment({"le"}));
  CHECK(r3.calls.size() == 2);
  CHECK(r3.calls[1].key == "iter3/decide/1");
  CHECK_FALSE(r3.fallback);
  in.iteration = 4;
  auto r4 = dm.decide(in);
  CHECK(r4.decision == Decision::regeneration());
  CHECK(r4.fallback);

  in.iteration = 1;
  in.enabled = {Strategy::ContextEnrichment, Strategy::Regeneration};
  auto limited = dm.decide(in);
  CHECK(limited.calls[0].prompt_text.find("Lemma Discovery") == std::string::npos);
}

TEST_CASE("dataset export and the majority baseline") {
  std::vector<LabeledExample> rows = {{{2, 3, 0, 1, 1.25, 1}, Strategy::ContextEnrichment},
                                      {{0, 0, 0, 0, 0.0, 0}, Strategy::Regeneration},
                                      {{1, 1, 0, 1, 3.0625, 0}, Strategy::ContextEnrichment}};
  std::stringstream ss;
  write_dataset(ss, rows);
  CHECK(ss.str().rfind("f1,f2,f3,f4,f5,f6,label\n2,3,0,1,1.25,1,ContextEnrichment\n", 0) == 0);
  CHECK(read_dataset(ss) == rows);
  std::stringstream bad("a,b\n");
  CHECK_THROWS_AS(read_dataset(bad), std::invalid_argument);

  auto model = std::make_shared<MajorityClassifier>(MajorityClassifier::train(rows));
  CHECK(model->predict({}) == Strategy::ContextEnrichment);
  CHECK(MajorityClassifier::train({}).predict({}) == Strategy::Regeneration);

  auto g = le_basics();
  auto ctx = ctx_with(g, {"n_le_m_Sn_le_Sm"}, true);
  auto report = stuck_report();
  ClassifierDecisionMaker dm(model);
  DecisionInput in{&g, "Theorem t : True.", &report, &ctx, 1, {}};
  in.enabled = {Strategy::LemmaDiscovery, Strategy::ContextEnrichment, Strategy::Regeneration};
  CHECK(dm.decide(in).decision == Decision::context_enrichment({"O_le_n"}));
  in.enabled = {Strategy::LemmaDiscovery, Strategy::Regeneration};
  CHECK(dm.decide(in).decision == Decision::regeneration());
}
