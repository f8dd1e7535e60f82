#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refiner/core/types.hpp"
#include "refiner/llm/templates.hpp"

namespace refiner {

// One statement per line.
std::string format_statements(const std::vector<const ContextItem*>& items);
std::string format_statements(const std::vector<ContextItem>& items);
// Statement followed by its proof; empty when absent.
std::string format_similar(const std::optional<SimilarProof>& similar);
std::string format_lemma_with_proof(const ContextItem& item);

// Stuck state, erroneous tactic, error message and partial proof.
Bindings failure_bindings(const FailureReport& report);
// Definitions, theorems and lemmas, similar proof.
Bindings context_bindings(const WorkingContext& ctx);

// Later bindings win.
Bindings merge(Bindings a, const Bindings& b);

}  // namespace refiner
