#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace refiner {

enum class ItemKind { Definition, Fixpoint, Inductive, Notation, Lemma, Theorem };

const char* to_string(ItemKind kind);
ItemKind item_kind_from_string(const std::string& text);

inline bool is_provable(ItemKind k) { return k == ItemKind::Lemma || k == ItemKind::Theorem; }
inline bool is_definitional(ItemKind k) {
  return k == ItemKind::Definition || k == ItemKind::Fixpoint || k == ItemKind::Inductive;
}

struct Origin {
  std::string path;
  std::size_t ordinal = 0;

  bool operator==(const Origin&) const = default;
};

// One named corpus entry. The statement is the full vernacular sentence,
// terminator included; proof spans from the proof-open sentence to Qed/Defined.
struct ContextItem {
  std::string name;
  ItemKind kind = ItemKind::Lemma;
  std::string statement;
  std::optional<std::string> proof;
  Origin origin;

  bool operator==(const ContextItem&) const = default;
};

// Throws std::invalid_argument when an invariant of ContextItem is broken.
void validate(const ContextItem& item);

struct Hypothesis {
  std::string name;
  std::string type_text;

  bool operator==(const Hypothesis&) const = default;
};

struct Goal {
  std::vector<Hypothesis> hypotheses;
  std::string conclusion;

  bool operator==(const Goal&) const = default;
};

struct ProofState {
  std::vector<Goal> goals;

  bool complete() const { return goals.empty(); }
  bool operator==(const ProofState&) const = default;
};

void validate(const ProofState& state);

// Renders the state the way the prover displays it: hypotheses, divider, goal.
std::string format_state(const ProofState& state);

struct FailureReport {
  std::string erroneous_tactic;
  std::string error_message;
  std::string partial_proof;
  ProofState stuck_state;

  bool operator==(const FailureReport&) const = default;
};

struct SimilarProof {
  std::string name;
  std::string statement;
  std::string proof;
  double score = 0.0;

  bool operator==(const SimilarProof&) const = default;
};

// The engine's evolving context. Updates are union-only.
class WorkingContext {
 public:
  const std::vector<ContextItem>& lemma_statements() const { return lemmas_; }
  const std::vector<ContextItem>& definitions() const { return definitions_; }
  const std::vector<ContextItem>& discovered() const { return discovered_; }
  const std::optional<SimilarProof>& similar_proof() const { return similar_; }

  void set_similar_proof(SimilarProof similar) { similar_ = std::move(similar); }

  // Each returns true when the item was new. Duplicates are detected by name
  // and by whitespace-normalized statement; the earliest entry wins.
  bool add_lemma(ContextItem item);
  bool add_definition(ContextItem item);
  bool add_discovered(ContextItem item);
  // Routes by kind: definitional kinds go to definitions, the rest to lemmas.
  bool add(ContextItem item);

  bool contains_name(const std::string& name) const;
  bool contains_statement(const std::string& statement) const;

  // All lemma-like statements visible to prompts (retrieved + discovered).
  std::vector<const ContextItem*> all_lemmas() const;
  // Sorted names of every member, used for monotonicity checks.
  std::vector<std::string> names() const;

  bool operator==(const WorkingContext&) const = default;

 private:
  std::vector<ContextItem> lemmas_;
  std::vector<ContextItem> definitions_;
  std::vector<ContextItem> discovered_;
  std::optional<SimilarProof> similar_;
};

enum class Strategy { LemmaDiscovery, ContextEnrichment, Regeneration };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& text);

class Decision {
 public:
  static Decision lemma_discovery(std::vector<std::string> refine_candidates = {});
  // An empty keyword list is useless for a search, so it degrades to Regeneration.
  static Decision context_enrichment(std::vector<std::string> keywords);
  static Decision regeneration();

  Strategy strategy() const { return strategy_; }
  const std::vector<std::string>& refine_candidates() const { return candidates_; }
  const std::vector<std::string>& keywords() const { return keywords_; }

  bool operator==(const Decision&) const = default;

 private:
  Strategy strategy_ = Strategy::Regeneration;
  std::vector<std::string> candidates_;
  std::vector<std::string> keywords_;
};

enum class DecisionMakerKind { Llm, Rule, Random, Classifier };
enum class EngineMode { Adapt, SelfRefine, SelfRefineRag };

const char* to_string(DecisionMakerKind k);
DecisionMakerKind decision_maker_from_string(const std::string& text);
const char* to_string(EngineMode m);
EngineMode engine_mode_from_string(const std::string& text);

// Per-slot character caps applied when rendering prompts.
struct PromptBudgets {
  std::size_t theorem_chars = 4000;
  std::size_t definitions_chars = 4000;
  std::size_t lemmas_chars = 8000;
  std::size_t similar_proof_chars = 4000;
  std::size_t state_chars = 4000;

  bool operator==(const PromptBudgets&) const = default;
};

struct EngineConfig {
  int iteration_limit = 3;
  int top_k = 10;
  DecisionMakerKind decision_maker = DecisionMakerKind::Llm;
  EngineMode mode = EngineMode::Adapt;
  bool disable_lemma_discovery = false;
  bool disable_enrichment = false;
  double llm_temperature = 0.0;
  int max_output_tokens = 2048;
  std::uint64_t rng_seed = 0;
  int max_new_lemmas = 5;
  PromptBudgets budgets;

  bool lemma_discovery_enabled() const {
    return mode == EngineMode::Adapt && !disable_lemma_discovery;
  }
  bool enrichment_enabled() const { return mode == EngineMode::Adapt && !disable_enrichment; }
  bool operator==(const EngineConfig&) const = default;
};

void validate(const EngineConfig& config);

enum class Outcome { Proved, Exhausted, Error };
enum class AttemptResult { Pass, Fail };

const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& text);

struct LlmCallSummary {
  std::string template_id;
  std::string key;
  std::size_t input_tokens = 0;
  std::size_t output_tokens = 0;

  bool operator==(const LlmCallSummary&) const = default;
};

struct AttemptRecord {
  std::vector<LlmCallSummary> llm_calls;
  std::size_t prover_calls = 0;
  AttemptResult result = AttemptResult::Fail;
  std::string error_message;

  bool operator==(const AttemptRecord&) const = default;
};

struct IterationRecord {
  int index = 0;
  Decision decision;
  bool fallback = false;
  std::vector<LlmCallSummary> llm_calls;
  std::size_t prover_calls = 0;
  AttemptResult result = AttemptResult::Fail;
  std::string error_message;
  std::vector<std::string> new_items;
  std::vector<std::string> context_names;

  bool operator==(const IterationRecord&) const = default;
};

struct TraceTotals {
  std::size_t iterations_used = 0;
  std::size_t input_tokens = 0;
  std::size_t output_tokens = 0;

  bool operator==(const TraceTotals&) const = default;
};

struct RefinementTrace {
  std::string theorem;
  Outcome outcome = Outcome::Exhausted;
  std::optional<std::string> final_proof;
  std::string error;
  std::size_t retrieval_calls = 0;
  AttemptRecord initial;
  std::vector<IterationRecord> iterations;
  TraceTotals totals;
  std::vector<ContextItem> discovered_lemmas;

  // Recomputes totals from the attempt records.
  void recompute_totals();
  bool operator==(const RefinementTrace&) const = default;
};

void validate(const RefinementTrace& trace);

}  // namespace refiner
