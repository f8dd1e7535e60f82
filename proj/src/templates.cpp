#include "refiner/llm/templates.hpp"

#include <array>

#include "refiner/core/text.hpp"

namespace refiner {

namespace {

// Instruction blocks reproduced as printed, wording quirks included.
const char* const kInitialInstructions =
    "You will be given a theorem statement written in Coq, with related definitions, theorems, "
    "and lemmas. Your job is to write a proof. You should first analyze how to prove it based on "
    "the definitions, and which theorems and lemmas can be used. Leverage as many theorems and "
    "lemmas as possible to facilitate your proof.";

const char* const kDecideInstructions =
    "We are proving a theorem in Coq but get stuck in a proof state, your need to select a "
    "refinement strategy to fix it. You will be provided with the theorem, and the diagnostic "
    "information, including the stuck proof state, the erroneous tactic that causes the error, "
    "the error message from Coq and the partial proof proceeding the erroneous tactic. Additional "
    "supporting context, including related definitions and lemmas, and a similar theorem with its "
    "proof are also provided.";

const char* const kProposeInstructions =
    "We are proving a theorem in Coq but get stuck in a proof state, your task is to propose some "
    "new lemma statements to help solve it. You will be given the theorem statement and proof "
    "state, together with related definitions, existing theorem and lemmas. Your lemmas must state "
    "new, non-trivial properties. For each proposed lemma statement, explain why it is correct and "
    "useful.";

const char* const kRefineInstructions =
    "We are proving a theorem in Coq but get stuck in a proof state, your task is to refine an "
    "existing lemma to help solve it. You will be given the theorem statement to prove, the stuck "
    "proof state, related definitions and the specific lemma to refine, including its proof. A set "
    "of existing theorems and lemmas are also provided. First analyze how to adapt this given "
    "lemma to help solve the proof goal, then produce the refined lemma statement together with "
    "its proof. Try to reuse the original proof of the given lemma where possible.";

const char* const kRegenerateInstructions =
    "I’m proving a theorem in Coq but got stuck in a proof state. You will be given the "
    "theorem statement to prove and the diagnostic information, including the stuck proof state, "
    "the erroneous tactic that causes the error, the error message from Coq and the partial proof "
    "proceeding the erroneous tactic. Additional context, including related definitions, theorems "
    "and lemmas, and a similar theorem with its proof are also provided. First analyze how to "
    "prove the theorem based on the provided context, then write a correct proof. You can repair "
    "the proof if the error is simple, or generate a new proof if the prior proof is infeasible.";

const std::array<PromptTemplate, 5>& all_templates() {
  static const std::array<PromptTemplate, 5> templates = {{
      {TemplateId::InitialProof,
       kInitialInstructions,
       {{"Theorem Statement", Slot::Theorem, false},
        {"Definitions", Slot::Definitions},
        {"Theorems and Lemmas", Slot::Lemmas}},
       false},
      {TemplateId::Decide,
       kDecideInstructions,
       {{"Theorem Statement", Slot::Theorem, false},
        {"Definitions", Slot::Definitions},
        {"Stuck Proof State", Slot::ProofState, false},
        {"Erroneous Tactic", Slot::ErroneousTactic},
        {"Error Message", Slot::ErrorMessage, false},
        {"Partial Proof", Slot::PartialProof},
        {"Theorems and Lemmas", Slot::Lemmas},
        {"Similar Proof", Slot::SimilarProof}},
       true},
      {TemplateId::ProposeLemmas,
       kProposeInstructions,
       {{"Theorem Statement", Slot::Theorem, false},
        {"Proof State", Slot::ProofState, false},
        {"Definitions", Slot::Definitions},
        {"Existing Theorems and Lemmas", Slot::Lemmas}},
       false},
      {TemplateId::RefineLemma,
       kRefineInstructions,
       {{"Theorem Statement", Slot::Theorem, false},
        {"Proof State", Slot::ProofState, false},
        {"Definitions", Slot::Definitions},
        {"Existing Theorems and Lemmas", Slot::Lemmas},
        {"Lemma to Refine", Slot::LemmaToRefine, false}},
       false},
      {TemplateId::Regenerate,
       kRegenerateInstructions,
       {{"Theorem Statement", Slot::Theorem, false},
        {"Stuck Proof State", Slot::ProofState, false},
        {"Erroneous Tactic", Slot::ErroneousTactic},
        {"Error Message", Slot::ErrorMessage, false},
        {"Partial Proof", Slot::PartialProof},
        {"Definitions", Slot::Definitions},
        {"Theorems and Lemmas", Slot::Lemmas},
        {"Similar Proof", Slot::SimilarProof}},
       false},
  }};
  return templates;
}

std::size_t cap_for(Slot slot, const PromptBudgets& b) {
  switch (slot) {
    case Slot::Theorem: return b.theorem_chars;
    case Slot::Definitions: return b.definitions_chars;
    case Slot::Lemmas: return b.lemmas_chars;
    case Slot::SimilarProof:
    case Slot::LemmaToRefine: return b.similar_proof_chars;
    case Slot::ProofState:
    case Slot::ErroneousTactic:
    case Slot::ErrorMessage:
    case Slot::PartialProof: return b.state_chars;
  }
  return b.state_chars;
}

}  // namespace

const char* to_string(TemplateId id) {
  switch (id) {
    case TemplateId::InitialProof: return "InitialProof";
    case TemplateId::Decide: return "Decide";
    case TemplateId::ProposeLemmas: return "ProposeLemmas";
    case TemplateId::RefineLemma: return "RefineLemma";
    case TemplateId::Regenerate: return "Regenerate";
  }
  return "?";
}

TemplateId template_id_from_string(const std::string& s) {
  for (const auto& t : all_templates())
    if (text::to_lower(s) == text::to_lower(to_string(t.id))) return t.id;
  throw std::invalid_argument("unknown template id: " + s);
}

const char* to_string(Slot slot) {
  switch (slot) {
    case Slot::Theorem: return "theorem";
    case Slot::Definitions: return "definitions";
    case Slot::ProofState: return "proof state";
    case Slot::ErroneousTactic: return "erroneous tactic";
    case Slot::ErrorMessage: return "error message";
    case Slot::PartialProof: return "partial proof";
    case Slot::Lemmas: return "theorems and lemmas";
    case Slot::SimilarProof: return "similar proof";
    case Slot::LemmaToRefine: return "lemma and proof";
  }
  return "?";
}

MissingSlot::MissingSlot(TemplateId id, Slot slot)
    : std::invalid_argument(std::string("template ") + to_string(id) + " needs slot <" +
                            to_string(slot) + ">"),
      slot_(slot) {}

const PromptTemplate& prompt_template(TemplateId id) {
  return all_templates()[static_cast<std::size_t>(id)];
}

std::string truncate_to(const std::string& value, std::size_t cap) {
  if (value.size() <= cap) return value;
  std::size_t cut = cap;
  // Do not split a UTF-8 sequence.
  while (cut > 0 && (static_cast<unsigned char>(value[cut]) & 0xC0) == 0x80) --cut;
  return value.substr(0, cut) + kTruncationMarker;
}

std::string strategy_options(const std::vector<Strategy>& strategies) {
  std::string out = "Analyze the provided information, then choose one of the following strategies:";
  int n = 0;
  for (Strategy s : strategies) {
    out += "\n" + std::to_string(++n) + ". ";
    switch (s) {
      case Strategy::LemmaDiscovery:
        out +=
            "Strategy: Lemma Discovery\n"
            "Description: Propose new lemmas or refine existing ones to help the proof.\n"
            "Output Format:`Lemma Discovery; [name_1, name_2 ...]'. This strategy always proposes "
            "new lemmas. Optionally, provide the names of existing lemmas or theorems to refine. "
            "Provide an empty list `[]' to only propose new lemmas.";
        break;
      case Strategy::ContextEnrichment:
        out +=
            "Strategy: Context Enrichment\n"
            "Description: Retrieve more relevant definitions, lemmas, theorems, and proofs from "
            "the project and imported libraries.\n"
            "Output Format:`Context Enrichment; [keyword_1, keyword_2, ...]' where you list "
            "keywords to search for, such as names of definitions or lemmas. Lemmas with the "
            "listed keywords in the statements will be retrieved.";
        break;
      case Strategy::Regeneration:
        out +=
            "Strategy: Regeneration\n"
            "Description: Directly regenerate the proof if the current context seems sufficient "
            "or the previous proof is unpromising.\n"
            "Output Format:`Regeneration'.";
        break;
    }
  }
  return out;
}

Prompt render(TemplateId id, const Bindings& bindings, const PromptBudgets& budgets,
              const RenderOptions& options) {
  const PromptTemplate& t = prompt_template(id);
  Prompt p;
  p.id = id;
  p.system = t.instructions;
  p.user = "INPUT";
  for (const auto& section : t.inputs) {
    auto it = bindings.find(section.slot);
    if (it == bindings.end() && !section.optional) throw MissingSlot(id, section.slot);
    std::string value = it == bindings.end() ? "" : text::trim(it->second);
    if (value.empty()) value = "None";
    value = truncate_to(value, cap_for(section.slot, budgets));
    p.user += "\n- " + section.label + ":";
    p.user += value.find('\n') == std::string::npos ? " " + value : "\n" + value;
  }
  if (!options.extra_instruction.empty()) p.user += "\n\n" + options.extra_instruction;
  if (t.has_strategy_options) p.user += "\n\nOUTPUT\n" + strategy_options(options.strategies);
  return p;
}

}  // namespace refiner
