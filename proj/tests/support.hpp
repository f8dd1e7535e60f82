#pragma once

// Fixture loaders shared by the test executables.

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "refiner/corpus/global_context.hpp"
#include "refiner/llm/gateway.hpp"
#include "refiner/prover/mock.hpp"

namespace refiner::testing {

inline GlobalContext le_basics() {
  return GlobalContext::ingest(collect_sources(REFINER_FIXTURES "/le_basics"));
}

// The le_basics files followed by leb_correct.
inline GlobalContext with_leb_correct() {
  auto files = collect_sources(REFINER_FIXTURES "/le_basics");
  for (auto& f : collect_sources(REFINER_FIXTURES "/leb_correct")) files.push_back(std::move(f));
  return GlobalContext::ingest(files);
}

inline std::shared_ptr<Gateway> stub_gateway(StubScenario scenario,
                                             PromptBudgets budgets = {}) {
  auto backend = std::make_shared<StubBackend>(std::make_shared<const StubScenario>(std::move(scenario)));
  return std::make_shared<Gateway>(backend, CompletionParams{}, budgets);
}

inline std::shared_ptr<Gateway> stub_gateway(const std::string& path) {
  return stub_gateway(StubScenario::load(path));
}

// Keeps every prompt it forwards, for assertions on rendered text.
class RecordingBackend : public LlmBackend {
 public:
  explicit RecordingBackend(std::shared_ptr<LlmBackend> inner) : inner_(std::move(inner)) {}
  LlmCallRecord complete(const Prompt& prompt, const CallKey& key,
                         const CompletionParams& params) override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      prompts_.push_back(prompt);
    }
    return inner_->complete(prompt, key, params);
  }
  std::vector<Prompt> prompts() const {
    std::lock_guard<std::mutex> lock(mu_);
    return prompts_;
  }

 private:
  std::shared_ptr<LlmBackend> inner_;
  mutable std::mutex mu_;
  std::vector<Prompt> prompts_;
};

struct RecordedGateway {
  std::shared_ptr<RecordingBackend> backend;
  std::shared_ptr<Gateway> gateway;
};

inline RecordedGateway recorded_gateway(StubScenario scenario) {
  auto stub = std::make_shared<StubBackend>(std::make_shared<const StubScenario>(std::move(scenario)));
  auto rec = std::make_shared<RecordingBackend>(stub);
  return {rec, std::make_shared<Gateway>(rec, CompletionParams{}, PromptBudgets{})};
}

inline MockProver mock_prover(const std::string& path) { return MockProver(MockScenario::load(path)); }

inline std::string fence(const std::string& body) { return "```coq\n" + body + "\n```"; }

inline const char* const kLebCorrect = "Theorem leb_correct : forall n m, n <= m -> leb n m = true.";
inline const char* const kConverse =
    "Lemma Sn_le_Sm_n_le_m : forall n m, (n + 1) <= (m + 1) -> n <= m.";
inline const char* const kConverseProof =
    "Proof. intros n m H. inversion H. - apply le_n. - apply (le_trans n (n + 1) m). + apply le_S. "
    "apply le_n. + apply H1. Qed.";

// Lemma discovery with four proposals (one ill-formed, one unprovable, two
// provable) and one refine candidate, all scoped to leb_correct.
struct Alg2Scenario {
  StubScenario llm;
  MockScenario prover;
};

inline Alg2Scenario alg2_scenario() {
  Alg2Scenario s;
  const std::string proposals =
      "1. Lemma bad_ref : forall n, n <= undefined_thing.\n"
      "It is false in general but harmless.\n"
      "2. Lemma wrong_way : forall n m, n <= m -> m <= n.\n"
      "3. Lemma le_n_Sn : forall n, n <= (n + 1).\n"
      "4. Lemma leb_refl : forall n, leb n n = true.\n";
  const std::string le_n_Sn = "Proof. intros n. apply le_S. apply le_n. Qed.";
  const std::string leb_refl = "Proof. intros n. induction n. - reflexivity. - simpl. apply IHn. Qed.";
  auto add = [&](const std::string& key, const std::string& response) {
    s.llm.add({key, "leb_correct", response, 100, 20});
  };
  add("iter1/propose", proposals);
  add("iter1/prove_lemma/1", fence("Proof. intros n m H. inversion H. auto. Qed."));
  add("iter1/prove_lemma/2", fence(le_n_Sn));
  add("iter1/prove_lemma/3", fence(leb_refl));
  add("iter1/refine/1", fence(std::string(kConverse) + "\n" + kConverseProof));
  nlohmann::json scripts = nlohmann::json::array();
  auto pass = [&](const std::string& theorem, const std::string& script) {
    scripts.push_back({{"theorem", theorem}, {"script", script}, {"outcome", "pass"}});
  };
  pass("Lemma le_n_Sn : forall n, n <= (n + 1).", le_n_Sn);
  pass("Lemma leb_refl : forall n, leb n n = true.", leb_refl);
  pass(kConverse, kConverseProof);
  s.prover = MockScenario::from_json({{"scripts", scripts}});
  return s;
}

}  // namespace refiner::testing
