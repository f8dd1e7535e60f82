#include "refiner/core/serialize.hpp"

namespace refiner {

namespace {

const char* result_name(AttemptResult r) { return r == AttemptResult::Pass ? "Pass" : "Fail"; }
AttemptResult result_from(const std::string& s) {
  if (s == "Pass") return AttemptResult::Pass;
  if (s == "Fail") return AttemptResult::Fail;
  throw std::invalid_argument("unknown attempt result: " + s);
}

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(out);
}

}  // namespace

void to_json(json& j, const Origin& o) { j = json{{"path", o.path}, {"ordinal", o.ordinal}}; }
void from_json(const json& j, Origin& o) {
  j.at("path").get_to(o.path);
  j.at("ordinal").get_to(o.ordinal);
}

void to_json(json& j, const ContextItem& item) {
  j = json{{"name", item.name},
           {"kind", to_string(item.kind)},
           {"statement", item.statement},
           {"proof", item.proof ? json(*item.proof) : json(nullptr)},
           {"origin", item.origin}};
}
void from_json(const json& j, ContextItem& item) {
  j.at("name").get_to(item.name);
  item.kind = item_kind_from_string(j.at("kind").get<std::string>());
  j.at("statement").get_to(item.statement);
  item.proof.reset();
  if (auto it = j.find("proof"); it != j.end() && !it->is_null()) item.proof = it->get<std::string>();
  get_opt(j, "origin", item.origin);
}

void to_json(json& j, const Hypothesis& h) { j = json{{"name", h.name}, {"type", h.type_text}}; }
void from_json(const json& j, Hypothesis& h) {
  j.at("name").get_to(h.name);
  j.at("type").get_to(h.type_text);
}

void to_json(json& j, const Goal& g) {
  j = json{{"hypotheses", g.hypotheses}, {"conclusion", g.conclusion}};
}
void from_json(const json& j, Goal& g) {
  g.hypotheses.clear();
  get_opt(j, "hypotheses", g.hypotheses);
  j.at("conclusion").get_to(g.conclusion);
}

void to_json(json& j, const ProofState& s) { j = json{{"goals", s.goals}}; }
void from_json(const json& j, ProofState& s) {
  s.goals.clear();
  get_opt(j, "goals", s.goals);
}

void to_json(json& j, const FailureReport& r) {
  j = json{{"erroneous_tactic", r.erroneous_tactic},
           {"error_message", r.error_message},
           {"partial_proof", r.partial_proof},
           {"stuck_state", r.stuck_state}};
}
void from_json(const json& j, FailureReport& r) {
  j.at("erroneous_tactic").get_to(r.erroneous_tactic);
  j.at("error_message").get_to(r.error_message);
  j.at("partial_proof").get_to(r.partial_proof);
  j.at("stuck_state").get_to(r.stuck_state);
}

void to_json(json& j, const SimilarProof& s) {
  j = json{{"name", s.name}, {"statement", s.statement}, {"proof", s.proof}, {"score", s.score}};
}
void from_json(const json& j, SimilarProof& s) {
  j.at("name").get_to(s.name);
  j.at("statement").get_to(s.statement);
  j.at("proof").get_to(s.proof);
  get_opt(j, "score", s.score);
}

void to_json(json& j, const WorkingContext& ctx) {
  j = json{{"lemma_statements", ctx.lemma_statements()},
           {"definitions", ctx.definitions()},
           {"discovered", ctx.discovered()},
           {"similar_proof", ctx.similar_proof() ? json(*ctx.similar_proof()) : json(nullptr)}};
}
void from_json(const json& j, WorkingContext& ctx) {
  ctx = WorkingContext{};
  for (const auto& i : j.at("lemma_statements")) ctx.add_lemma(i.get<ContextItem>());
  for (const auto& i : j.at("definitions")) ctx.add_definition(i.get<ContextItem>());
  for (const auto& i : j.at("discovered")) ctx.add_discovered(i.get<ContextItem>());
  if (auto it = j.find("similar_proof"); it != j.end() && !it->is_null())
    ctx.set_similar_proof(it->get<SimilarProof>());
}

void to_json(json& j, const Decision& d) {
  j = json{{"strategy", to_string(d.strategy())}};
  if (d.strategy() == Strategy::LemmaDiscovery) j["refine_candidates"] = d.refine_candidates();
  if (d.strategy() == Strategy::ContextEnrichment) j["keywords"] = d.keywords();
}
void from_json(const json& j, Decision& d) {
  switch (strategy_from_string(j.at("strategy").get<std::string>())) {
    case Strategy::LemmaDiscovery:
      d = Decision::lemma_discovery(j.value("refine_candidates", std::vector<std::string>{}));
      break;
    case Strategy::ContextEnrichment:
      d = Decision::context_enrichment(j.value("keywords", std::vector<std::string>{}));
      break;
    case Strategy::Regeneration:
      d = Decision::regeneration();
      break;
  }
}

void to_json(json& j, const PromptBudgets& b) {
  j = json{{"theorem_chars", b.theorem_chars},
           {"definitions_chars", b.definitions_chars},
           {"lemmas_chars", b.lemmas_chars},
           {"similar_proof_chars", b.similar_proof_chars},
           {"state_chars", b.state_chars}};
}
void from_json(const json& j, PromptBudgets& b) {
  get_opt(j, "theorem_chars", b.theorem_chars);
  get_opt(j, "definitions_chars", b.definitions_chars);
  get_opt(j, "lemmas_chars", b.lemmas_chars);
  get_opt(j, "similar_proof_chars", b.similar_proof_chars);
  get_opt(j, "state_chars", b.state_chars);
}

void to_json(json& j, const EngineConfig& c) {
  j = json{{"iteration_limit", c.iteration_limit},
           {"top_k", c.top_k},
           {"decision_maker", to_string(c.decision_maker)},
           {"mode", to_string(c.mode)},
           {"disable_lemma_discovery", c.disable_lemma_discovery},
           {"disable_enrichment", c.disable_enrichment},
           {"llm_temperature", c.llm_temperature},
           {"max_output_tokens", c.max_output_tokens},
           {"rng_seed", c.rng_seed},
           {"max_new_lemmas", c.max_new_lemmas},
           {"budgets", c.budgets}};
}
void from_json(const json& j, EngineConfig& c) {
  get_opt(j, "iteration_limit", c.iteration_limit);
  get_opt(j, "top_k", c.top_k);
  if (j.contains("decision_maker"))
    c.decision_maker = decision_maker_from_string(j["decision_maker"].get<std::string>());
  if (j.contains("mode")) c.mode = engine_mode_from_string(j["mode"].get<std::string>());
  get_opt(j, "disable_lemma_discovery", c.disable_lemma_discovery);
  get_opt(j, "disable_enrichment", c.disable_enrichment);
  get_opt(j, "llm_temperature", c.llm_temperature);
  get_opt(j, "max_output_tokens", c.max_output_tokens);
  get_opt(j, "rng_seed", c.rng_seed);
  get_opt(j, "max_new_lemmas", c.max_new_lemmas);
  get_opt(j, "budgets", c.budgets);
}

void to_json(json& j, const LlmCallSummary& c) {
  j = json{{"template", c.template_id},
           {"key", c.key},
           {"input_tokens", c.input_tokens},
           {"output_tokens", c.output_tokens}};
}
void from_json(const json& j, LlmCallSummary& c) {
  j.at("template").get_to(c.template_id);
  get_opt(j, "key", c.key);
  j.at("input_tokens").get_to(c.input_tokens);
  j.at("output_tokens").get_to(c.output_tokens);
}

void to_json(json& j, const AttemptRecord& a) {
  j = json{{"llm_calls", a.llm_calls},
           {"prover_calls", a.prover_calls},
           {"result", result_name(a.result)}};
  if (!a.error_message.empty()) j["error_message"] = a.error_message;
}
void from_json(const json& j, AttemptRecord& a) {
  j.at("llm_calls").get_to(a.llm_calls);
  j.at("prover_calls").get_to(a.prover_calls);
  a.result = result_from(j.at("result").get<std::string>());
  a.error_message = j.value("error_message", std::string{});
}

void to_json(json& j, const IterationRecord& r) {
  j = json{{"index", r.index},
           {"decision", r.decision},
           {"fallback", r.fallback},
           {"llm_calls", r.llm_calls},
           {"prover_calls", r.prover_calls},
           {"result", result_name(r.result)},
           {"new_items", r.new_items},
           {"context", r.context_names}};
  if (!r.error_message.empty()) j["error_message"] = r.error_message;
}
void from_json(const json& j, IterationRecord& r) {
  j.at("index").get_to(r.index);
  j.at("decision").get_to(r.decision);
  get_opt(j, "fallback", r.fallback);
  j.at("llm_calls").get_to(r.llm_calls);
  j.at("prover_calls").get_to(r.prover_calls);
  r.result = result_from(j.at("result").get<std::string>());
  r.error_message = j.value("error_message", std::string{});
  r.new_items = j.value("new_items", std::vector<std::string>{});
  r.context_names = j.value("context", std::vector<std::string>{});
}

void to_json(json& j, const TraceTotals& t) {
  j = json{{"iterations_used", t.iterations_used},
           {"input_tokens", t.input_tokens},
           {"output_tokens", t.output_tokens}};
}
void from_json(const json& j, TraceTotals& t) {
  j.at("iterations_used").get_to(t.iterations_used);
  j.at("input_tokens").get_to(t.input_tokens);
  j.at("output_tokens").get_to(t.output_tokens);
}

void to_json(json& j, const RefinementTrace& t) {
  j = json{{"theorem", t.theorem},
           {"outcome", to_string(t.outcome)},
           {"final_proof", t.final_proof ? json(*t.final_proof) : json(nullptr)},
           {"retrieval_calls", t.retrieval_calls},
           {"initial", t.initial},
           {"iterations", t.iterations},
           {"totals", t.totals},
           {"discovered_lemmas", t.discovered_lemmas}};
  if (!t.error.empty()) j["error"] = t.error;
}
void from_json(const json& j, RefinementTrace& t) {
  j.at("theorem").get_to(t.theorem);
  t.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  t.final_proof.reset();
  if (auto it = j.find("final_proof"); it != j.end() && !it->is_null())
    t.final_proof = it->get<std::string>();
  get_opt(j, "retrieval_calls", t.retrieval_calls);
  j.at("initial").get_to(t.initial);
  j.at("iterations").get_to(t.iterations);
  j.at("totals").get_to(t.totals);
  t.discovered_lemmas.clear();
  get_opt(j, "discovered_lemmas", t.discovered_lemmas);
  t.error = j.value("error", std::string{});
}

std::string trace_to_line(const RefinementTrace& trace) { return json(trace).dump(); }

RefinementTrace trace_from_line(const std::string& line) {
  return json::parse(line).get<RefinementTrace>();
}

}  // namespace refiner
