#include "refiner/llm/bindings.hpp"

namespace refiner {

std::string format_statements(const std::vector<const ContextItem*>& items) {
  std::string out;
  for (const auto* item : items) {
    if (!out.empty()) out += "\n";
    out += item->statement;
  }
  return out;
}

std::string format_statements(const std::vector<ContextItem>& items) {
  std::vector<const ContextItem*> ptrs;
  for (const auto& i : items) ptrs.push_back(&i);
  return format_statements(ptrs);
}

std::string format_similar(const std::optional<SimilarProof>& similar) {
  if (!similar) return {};
  return similar->statement + "\n" + similar->proof;
}

std::string format_lemma_with_proof(const ContextItem& item) {
  return item.statement + "\n" + item.proof.value_or("");
}

Bindings failure_bindings(const FailureReport& report) {
  return {{Slot::ProofState, format_state(report.stuck_state)},
          {Slot::ErroneousTactic, report.erroneous_tactic},
          {Slot::ErrorMessage, report.error_message},
          {Slot::PartialProof, report.partial_proof}};
}

Bindings context_bindings(const WorkingContext& ctx) {
  return {{Slot::Definitions, format_statements(ctx.definitions())},
          {Slot::Lemmas, format_statements(ctx.all_lemmas())},
          {Slot::SimilarProof, format_similar(ctx.similar_proof())}};
}

Bindings merge(Bindings a, const Bindings& b) {
  for (const auto& [k, v] : b) a[k] = v;
  return a;
}

}  // namespace refiner
