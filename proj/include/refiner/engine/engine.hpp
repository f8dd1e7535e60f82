#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refiner/core/types.hpp"
#include "refiner/corpus/global_context.hpp"
#include "refiner/decision/decision.hpp"
#include "refiner/llm/gateway.hpp"
#include "refiner/prover/prover.hpp"

namespace refiner {

// What one BM25 pass over g yields for a theorem. The initial prompt and the
// working context share it, so a run retrieves once.
struct Retrieval {
  std::vector<const ContextItem*> lemmas;
  std::optional<SimilarProof> similar;
};

Retrieval retrieve(const GlobalContext& g, const std::string& theorem, std::size_t top_k);

WorkingContext context_initialize(const GlobalContext& g, const std::string& theorem,
                                  const FailureReport& report, const Retrieval& retrieval);
WorkingContext context_initialize(const GlobalContext& g, const std::string& theorem,
                                  const FailureReport& report, std::size_t top_k);

// Strategies the decision-maker may pick under the config; Regeneration is
// always present.
std::vector<Strategy> enabled_strategies(const EngineConfig& config);

// Per-theorem seed so batch results do not depend on scheduling.
std::uint64_t task_seed(std::uint64_t seed, const std::string& theorem_name);

std::unique_ptr<DecisionMaker> make_decision_maker(const EngineConfig& config,
                                                   std::shared_ptr<const Gateway> gateway,
                                                   std::shared_ptr<const Classifier> classifier,
                                                   std::uint64_t seed);

// Refines one theorem. `g` is the project as it stood before the theorem;
// its items form the prover preamble.
RefinementTrace prove(const GlobalContext& g, const std::string& theorem,
                      const EngineConfig& config, const Gateway& gateway, const Prover& prover,
                      DecisionMaker& decision_maker);

struct BatchOptions {
  std::size_t jobs = 1;
  std::shared_ptr<const Classifier> classifier;
};

// Proves each named theorem of `corpus` against the items before it, with
// its own proof masked. Traces come back in input order; unknown names yield
// Error traces.
std::vector<RefinementTrace> prove_batch(const GlobalContext& corpus,
                                         const std::vector<std::string>& names,
                                         const EngineConfig& config,
                                         std::shared_ptr<const Gateway> gateway,
                                         const Prover& prover, const BatchOptions& options = {});

struct BatchSummary {
  std::size_t proved = 0;
  std::size_t total = 0;
  double avg_iterations = 0.0;
  double avg_input_tokens = 0.0;
  double avg_output_tokens = 0.0;

  bool operator==(const BatchSummary&) const = default;
};

// Averages are over every trace, proved or not.
BatchSummary summarize(const std::vector<RefinementTrace>& traces);
nlohmann::json to_json(const BatchSummary& summary);

struct IterationReport {
  int iteration = 0;
  std::size_t decisions = 0;
  std::size_t fallbacks = 0;
  // Percent of this iteration's decisions per strategy.
  std::map<Strategy, double> strategy_percent;
  // Percent of all traces proved at or before this iteration.
  double cumulative_success = 0.0;
};

std::vector<IterationReport> aggregate(const std::vector<RefinementTrace>& traces);
nlohmann::json to_json(const std::vector<IterationReport>& report);

}  // namespace refiner
