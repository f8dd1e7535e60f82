#include "refiner/core/types.hpp"

#include <algorithm>
#include <set>

#include "refiner/core/text.hpp"

namespace refiner {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& text, const char* const (&names)[N], const char* what) {
  std::string wanted = text::to_lower(text);
  for (std::size_t i = 0; i < N; ++i)
    if (text::to_lower(names[i]) == wanted) return static_cast<Enum>(i);
  throw std::invalid_argument(std::string("unknown ") + what + ": " + text);
}

constexpr const char* kItemKinds[] = {"Definition", "Fixpoint", "Inductive",
                                      "Notation",   "Lemma",    "Theorem"};
constexpr const char* kStrategies[] = {"LemmaDiscovery", "ContextEnrichment", "Regeneration"};
constexpr const char* kDecisionMakers[] = {"llm", "rule", "random", "classifier"};
constexpr const char* kModes[] = {"adapt", "self-refine", "self-refine-rag"};
constexpr const char* kOutcomes[] = {"Proved", "Exhausted", "Error"};

}  // namespace

const char* to_string(ItemKind kind) { return kItemKinds[static_cast<int>(kind)]; }
ItemKind item_kind_from_string(const std::string& s) {
  return parse_enum<ItemKind>(s, kItemKinds, "item kind");
}
const char* to_string(Strategy s) { return kStrategies[static_cast<int>(s)]; }
Strategy strategy_from_string(const std::string& s) {
  return parse_enum<Strategy>(s, kStrategies, "strategy");
}
const char* to_string(DecisionMakerKind k) { return kDecisionMakers[static_cast<int>(k)]; }
DecisionMakerKind decision_maker_from_string(const std::string& s) {
  return parse_enum<DecisionMakerKind>(s, kDecisionMakers, "decision maker");
}
const char* to_string(EngineMode m) { return kModes[static_cast<int>(m)]; }
EngineMode engine_mode_from_string(const std::string& s) {
  return parse_enum<EngineMode>(s, kModes, "mode");
}
const char* to_string(Outcome o) { return kOutcomes[static_cast<int>(o)]; }
Outcome outcome_from_string(const std::string& s) {
  return parse_enum<Outcome>(s, kOutcomes, "outcome");
}

void validate(const ContextItem& item) {
  if (item.name.empty()) throw std::invalid_argument("context item has an empty name");
  if (item.proof && !is_provable(item.kind))
    throw std::invalid_argument("only lemmas and theorems carry proofs: " + item.name);
  std::string stmt = text::trim(item.statement);
  if (stmt.empty() || stmt.back() != '.')
    throw std::invalid_argument("statement must end with '.': " + item.name);
}

void validate(const ProofState& state) {
  for (const auto& goal : state.goals) {
    std::set<std::string> seen;
    for (const auto& h : goal.hypotheses)
      if (!seen.insert(h.name).second)
        throw std::invalid_argument("duplicate hypothesis name: " + h.name);
  }
}

std::string format_state(const ProofState& state) {
  if (state.goals.empty()) return "No more goals.";
  std::string out;
  for (std::size_t g = 0; g < state.goals.size(); ++g) {
    const Goal& goal = state.goals[g];
    if (g > 0) out += "\n\ngoal " + std::to_string(g + 1) + " is:\n";
    if (g == 0) {
      for (const auto& h : goal.hypotheses) out += h.name + " : " + h.type_text + "\n";
      out += "============================\n";
    }
    out += goal.conclusion;
  }
  return out;
}

bool WorkingContext::contains_name(const std::string& name) const {
  auto has = [&](const std::vector<ContextItem>& v) {
    return std::any_of(v.begin(), v.end(), [&](const ContextItem& i) { return i.name == name; });
  };
  return has(lemmas_) || has(definitions_) || has(discovered_);
}

bool WorkingContext::contains_statement(const std::string& statement) const {
  std::string norm = text::normalize_ws(statement);
  auto has = [&](const std::vector<ContextItem>& v) {
    return std::any_of(v.begin(), v.end(), [&](const ContextItem& i) {
      return text::normalize_ws(i.statement) == norm;
    });
  };
  return has(lemmas_) || has(definitions_) || has(discovered_);
}

bool WorkingContext::add_lemma(ContextItem item) {
  if (contains_name(item.name) || contains_statement(item.statement)) return false;
  lemmas_.push_back(std::move(item));
  return true;
}

bool WorkingContext::add_definition(ContextItem item) {
  if (contains_name(item.name) || contains_statement(item.statement)) return false;
  definitions_.push_back(std::move(item));
  return true;
}

bool WorkingContext::add_discovered(ContextItem item) {
  if (contains_name(item.name) || contains_statement(item.statement)) return false;
  discovered_.push_back(std::move(item));
  return true;
}

bool WorkingContext::add(ContextItem item) {
  if (is_definitional(item.kind)) return add_definition(std::move(item));
  return add_lemma(std::move(item));
}

std::vector<const ContextItem*> WorkingContext::all_lemmas() const {
  std::vector<const ContextItem*> out;
  for (const auto& i : lemmas_) out.push_back(&i);
  for (const auto& i : discovered_) out.push_back(&i);
  return out;
}

std::vector<std::string> WorkingContext::names() const {
  std::vector<std::string> out;
  for (const auto* v : {&lemmas_, &definitions_, &discovered_})
    for (const auto& i : *v) out.push_back(i.name);
  if (similar_) out.push_back(similar_->name);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Decision Decision::lemma_discovery(std::vector<std::string> refine_candidates) {
  Decision d;
  d.strategy_ = Strategy::LemmaDiscovery;
  d.candidates_ = std::move(refine_candidates);
  return d;
}

Decision Decision::context_enrichment(std::vector<std::string> keywords) {
  if (keywords.empty()) return regeneration();
  Decision d;
  d.strategy_ = Strategy::ContextEnrichment;
  d.keywords_ = std::move(keywords);
  return d;
}

Decision Decision::regeneration() { return Decision{}; }

void validate(const EngineConfig& config) {
  if (config.iteration_limit < 1) throw std::invalid_argument("iteration_limit must be >= 1");
  if (config.top_k < 0) throw std::invalid_argument("top_k must be >= 0");
  if (config.max_new_lemmas < 0) throw std::invalid_argument("max_new_lemmas must be >= 0");
  if (config.llm_temperature < 0) throw std::invalid_argument("temperature must be >= 0");
}

void RefinementTrace::recompute_totals() {
  totals = {};
  totals.iterations_used = iterations.size();
  auto add = [&](const std::vector<LlmCallSummary>& calls) {
    for (const auto& c : calls) {
      totals.input_tokens += c.input_tokens;
      totals.output_tokens += c.output_tokens;
    }
  };
  add(initial.llm_calls);
  for (const auto& it : iterations) add(it.llm_calls);
}

void validate(const RefinementTrace& trace) {
  RefinementTrace copy = trace;
  copy.recompute_totals();
  if (!(copy.totals == trace.totals)) throw std::invalid_argument("trace totals are inconsistent");
  bool proved = trace.outcome == Outcome::Proved;
  if (proved != trace.final_proof.has_value())
    throw std::invalid_argument("final_proof must be present iff the outcome is Proved");
  if (proved) {
    AttemptResult last = trace.iterations.empty() ? trace.initial.result
                                                  : trace.iterations.back().result;
    if (last != AttemptResult::Pass)
      throw std::invalid_argument("a proved trace must end with a passing attempt");
  }
}

}  // namespace refiner
