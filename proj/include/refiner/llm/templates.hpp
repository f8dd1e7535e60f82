#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refiner/core/types.hpp"

namespace refiner {

enum class TemplateId { InitialProof, Decide, ProposeLemmas, RefineLemma, Regenerate };

const char* to_string(TemplateId id);
TemplateId template_id_from_string(const std::string& text);

enum class Slot {
  Theorem,
  Definitions,
  ProofState,
  ErroneousTactic,
  ErrorMessage,
  PartialProof,
  Lemmas,
  SimilarProof,
  LemmaToRefine,
};

const char* to_string(Slot slot);

struct TemplateSection {
  std::string label;
  Slot slot;
  bool optional = true;
};

struct PromptTemplate {
  TemplateId id;
  std::string instructions;
  std::vector<TemplateSection> inputs;
  bool has_strategy_options = false;  // the Decide template's OUTPUT block
};

const PromptTemplate& prompt_template(TemplateId id);

class MissingSlot : public std::invalid_argument {
 public:
  MissingSlot(TemplateId id, Slot slot);
  Slot slot() const { return slot_; }

 private:
  Slot slot_;
};

using Bindings = std::map<Slot, std::string>;

struct RenderOptions {
  // Strategies offered by the Decide template, in display order.
  std::vector<Strategy> strategies = {Strategy::LemmaDiscovery, Strategy::ContextEnrichment,
                                      Strategy::Regeneration};
  // Appended after the input list (e.g. "leverage the new lemmas" lines).
  std::string extra_instruction;
};

// The two halves match the chat request: system carries the instructions,
// user carries the bound inputs (and the Decide output options).
struct Prompt {
  TemplateId id = TemplateId::InitialProof;
  std::string system;
  std::string user;

  std::string text() const { return "INSTRUCTIONS\n" + system + "\n\n" + user; }
  bool operator==(const Prompt&) const = default;
};

inline const char* const kTruncationMarker = "…[truncated]";

std::string truncate_to(const std::string& value, std::size_t cap);

// Deterministic. Unbound optional slots and empty values render as "None".
Prompt render(TemplateId id, const Bindings& bindings, const PromptBudgets& budgets,
              const RenderOptions& options = {});

// The Decide template's OUTPUT block for the given strategies, renumbered.
std::string strategy_options(const std::vector<Strategy>& strategies);

}  // namespace refiner
