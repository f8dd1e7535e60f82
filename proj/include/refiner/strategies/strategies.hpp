#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "refiner/core/types.hpp"
#include "refiner/corpus/global_context.hpp"
#include "refiner/llm/gateway.hpp"
#include "refiner/prover/prover.hpp"

namespace refiner {

// Per-theorem state shared by the strategies: the preamble the prover sees,
// the run-scoped name counter, and the accounting of the current step.
class RunState {
 public:
  RunState(const GlobalContext& g, const Gateway& gateway, const Prover& prover,
           const EngineConfig& config, std::string theorem);

  const GlobalContext& g() const { return g_; }
  const EngineConfig& config() const { return config_; }
  const std::string& theorem() const { return theorem_; }
  const std::string& theorem_name() const { return theorem_name_; }
  const std::vector<ContextItem>& preamble() const { return preamble_; }

  // Adds verified lemmas for every later prover call in this run.
  void extend_preamble(const std::vector<ContextItem>& lemmas);

  LlmCallRecord llm(TemplateId id, const Bindings& bindings, const std::string& key,
                    const RenderOptions& options = {});
  // Books a call made elsewhere (the decision-maker) against this step.
  void record(const LlmCallRecord& call) { pending_.calls.push_back(call); }
  ProofOutcome execute(const std::string& statement, const std::string& proof);
  StatementCheck validate(const std::string& statement);
  // Checks a finished proof in a session that has never seen this run.
  ProofOutcome verify_fresh(const std::string& statement, const std::string& proof);

  // Lemma/Theorem retrieval for a statement, leaving the run's theorem out.
  std::vector<const ContextItem*> retrieve_lemmas(const std::string& statement);
  std::size_t retrieval_calls() const { return retrieval_calls_; }
  void count_retrieval() { ++retrieval_calls_; }

  std::string fresh_aux_name();
  // True when any known item (g, preamble, the theorem) already has the name.
  bool name_taken(const std::string& name) const;

  // Accounting since the last take_accounting() call.
  struct Accounting {
    std::vector<LlmCallRecord> calls;
    std::size_t prover_calls = 0;
  };
  Accounting take_accounting();

 private:
  ProverSession& session();

  const GlobalContext& g_;
  const Gateway& gateway_;
  const Prover& prover_;
  const EngineConfig& config_;
  std::string theorem_;
  std::string theorem_name_;
  std::vector<ContextItem> preamble_;
  std::unique_ptr<ProverSession> session_;
  int aux_counter_ = 0;
  std::size_t retrieval_calls_ = 0;
  Accounting pending_;
};

// Key under which statements are compared for redundancy: the proposition
// with keyword and name dropped, whitespace-normalized.
std::string statement_key(const std::string& statement);

// Names an unnamed statement, or renames one whose name is already taken.
std::string with_name(const std::string& statement, const std::string& name);

// Both stages of lemma discovery. Returned lemmas carry their proofs, in
// proposal order followed by refinements.
std::vector<ContextItem> lemma_discovery(RunState& run, const FailureReport& report,
                                         const WorkingContext& ctx,
                                         const std::vector<std::string>& refine_candidates,
                                         int iteration);

// Keyword search results not yet in ctx, capped at top_k.
std::vector<ContextItem> enrich_context(const GlobalContext& g, const WorkingContext& ctx,
                                        const std::vector<std::string>& keywords, std::size_t top_k,
                                        const std::string& exclude_name = {});

enum class RegenMode { Plain, WithNewLemmas, WithNewCtx };

// The leverage line appended to the Regenerate prompt, empty for Plain or no names.
std::string leverage_instruction(RegenMode mode, const std::vector<std::string>& names);

std::optional<std::string> regenerate(RunState& run, const FailureReport& report,
                                      const WorkingContext& ctx, RegenMode mode,
                                      const std::vector<std::string>& new_names, int iteration);

}  // namespace refiner
