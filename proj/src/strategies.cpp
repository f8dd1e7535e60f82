#include "refiner/strategies/strategies.hpp"

#include <set>

#include "refiner/core/text.hpp"
#include "refiner/core/vernacular.hpp"
#include "refiner/llm/bindings.hpp"

namespace refiner {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

// Splits "Lemma name rest" into the keyword prefix, the name (possibly
// empty) and everything after it.
struct Head {
  std::string keyword;
  std::string name;
  std::string rest;
};

Head split_head(const std::string& statement) {
  std::string s = text::normalize_ws(statement);
  Head h;
  std::size_t pos = 0;
  // Keyword plus any locality prefix words.
  while (true) {
    std::size_t end = s.find(' ', pos);
    if (end == std::string::npos) end = s.size();
    std::string word = s.substr(pos, end - pos);
    pos = end;
    bool prefix = word == "Local" || word == "Global" || word == "Program" ||
                  word == "#[global]" || word == "#[local]";
    if (!prefix || pos >= s.size()) break;
    ++pos;
  }
  h.keyword = s.substr(0, pos);
  std::size_t i = pos;
  while (i < s.size() && s[i] == ' ') ++i;
  std::size_t j = i;
  if (j < s.size() && is_ident_start(s[j]))
    while (j < s.size() && text::is_ident_char(s[j])) ++j;
  std::string name = s.substr(i, j - i);
  if (name == "forall" || name == "exists") {
    name.clear();
    j = i;
  }
  h.name = name;
  h.rest = text::trim(s.substr(j));
  return h;
}

std::string step_key(int iteration, const std::string& phase) {
  return "iter" + std::to_string(iteration) + "/" + phase;
}

}  // namespace

std::string statement_key(const std::string& statement) { return split_head(statement).rest; }

std::string with_name(const std::string& statement, const std::string& name) {
  Head h = split_head(statement);
  return h.keyword + " " + name + " " + h.rest;
}

RunState::RunState(const GlobalContext& g, const Gateway& gateway, const Prover& prover,
                   const EngineConfig& config, std::string theorem)
    : g_(g),
      gateway_(gateway),
      prover_(prover),
      config_(config),
      theorem_(std::move(theorem)),
      theorem_name_(vernacular::item_name(theorem_)),
      preamble_(g.ordered()) {}

void RunState::extend_preamble(const std::vector<ContextItem>& lemmas) {
  if (lemmas.empty()) return;
  preamble_.insert(preamble_.end(), lemmas.begin(), lemmas.end());
  session_.reset();
}

ProverSession& RunState::session() {
  if (!session_) session_ = prover_.open(preamble_);
  return *session_;
}

LlmCallRecord RunState::llm(TemplateId id, const Bindings& bindings, const std::string& key,
                            const RenderOptions& options) {
  LlmCallRecord rec = gateway_.call(id, bindings, CallKey{theorem_name_, key}, options);
  pending_.calls.push_back(rec);
  return rec;
}

ProofOutcome RunState::execute(const std::string& statement, const std::string& proof) {
  ++pending_.prover_calls;
  return session().execute_proof(statement, proof);
}

StatementCheck RunState::validate(const std::string& statement) {
  ++pending_.prover_calls;
  return session().validate_statement(statement);
}

ProofOutcome RunState::verify_fresh(const std::string& statement, const std::string& proof) {
  ++pending_.prover_calls;
  auto fresh = prover_.open(preamble_);
  return fresh->execute_proof(statement, proof);
}

std::vector<const ContextItem*> RunState::retrieve_lemmas(const std::string& statement) {
  ++retrieval_calls_;
  // One extra slot so dropping the theorem still leaves top_k candidates.
  auto hits = g_.bm25_top_k(statement, static_cast<std::size_t>(config_.top_k) + 1);
  std::vector<const ContextItem*> out;
  for (const auto* item : hits) {
    if (item->name == theorem_name_) continue;
    if (out.size() == static_cast<std::size_t>(config_.top_k)) break;
    out.push_back(item);
  }
  return out;
}

bool RunState::name_taken(const std::string& name) const {
  if (name == theorem_name_ || g_.contains(name)) return true;
  for (const auto& item : preamble_)
    if (item.name == name) return true;
  return false;
}

std::string RunState::fresh_aux_name() {
  std::string name;
  do {
    name = "adapt_aux_" + std::to_string(++aux_counter_);
  } while (name_taken(name));
  return name;
}

RunState::Accounting RunState::take_accounting() {
  Accounting out = std::move(pending_);
  pending_ = {};
  return out;
}

namespace {

// Tracks what lemma discovery has already produced so nothing redundant or
// clashing comes back.
class Novelty {
 public:
  Novelty(const RunState& run, const WorkingContext& ctx) {
    keys_.insert(statement_key(run.theorem()));
    for (const auto* item : run.g().named_items())
      if (is_provable(item->kind)) keys_.insert(statement_key(item->statement));
    for (const auto* item : ctx.all_lemmas()) keys_.insert(statement_key(item->statement));
    for (const auto& item : ctx.definitions()) names_.insert(item.name);
    for (const auto* item : ctx.all_lemmas()) names_.insert(item->name);
  }

  bool redundant(const std::string& statement) const {
    return keys_.count(statement_key(statement)) > 0;
  }

  // Gives the statement a usable name: unnamed or clashing ones are renamed.
  std::string named(RunState& run, const std::string& statement) {
    std::string name = split_head(statement).name;
    if (!name.empty() && !run.name_taken(name) && !names_.count(name)) return statement;
    std::string fresh;
    do {
      fresh = run.fresh_aux_name();
    } while (names_.count(fresh));
    return with_name(statement, fresh);
  }

  void accept(const ContextItem& item) {
    keys_.insert(statement_key(item.statement));
    names_.insert(item.name);
  }

 private:
  std::set<std::string> keys_;
  std::set<std::string> names_;
};

ContextItem discovered_item(const std::string& statement, const std::string& proof) {
  ContextItem item;
  item.name = split_head(statement).name;
  item.kind = ItemKind::Lemma;
  item.statement = text::normalize_ws(statement);
  item.proof = proof;
  item.origin = Origin{"<discovered>", 0};
  return item;
}

const ContextItem* find_candidate(const RunState& run, const WorkingContext& ctx,
                                  const std::string& name) {
  for (const auto* item : ctx.all_lemmas())
    if (item->name == name) return item;
  return run.g().find(name);
}

}  // namespace

std::vector<ContextItem> lemma_discovery(RunState& run, const FailureReport& report,
                                         const WorkingContext& ctx,
                                         const std::vector<std::string>& refine_candidates,
                                         int iteration) {
  std::vector<ContextItem> verified;
  Novelty novelty(run, ctx);
  const Bindings shared = {{Slot::Theorem, run.theorem()},
                           {Slot::ProofState, format_state(report.stuck_state)},
                           {Slot::Definitions, format_statements(ctx.definitions())},
                           {Slot::Lemmas, format_statements(ctx.all_lemmas())}};

  // Propose new lemmas.
  auto proposal = run.llm(TemplateId::ProposeLemmas, shared, step_key(iteration, "propose"));
  std::vector<std::string> survivors;
  for (const auto& raw : extract_lemma_statements(proposal.response_text)) {
    if (survivors.size() >= static_cast<std::size_t>(run.config().max_new_lemmas)) break;
    if (novelty.redundant(raw)) continue;
    std::string stmt = novelty.named(run, raw);
    if (!run.validate(stmt).valid) continue;
    survivors.push_back(stmt);
    novelty.accept(discovered_item(stmt, ""));
  }
  for (std::size_t m = 0; m < survivors.size(); ++m) {
    const std::string& stmt = survivors[m];
    Bindings b = {{Slot::Theorem, stmt},
                  {Slot::Definitions, format_statements(run.g().definitions_in(stmt))},
                  {Slot::Lemmas, format_statements(run.retrieve_lemmas(stmt))}};
    auto rec = run.llm(TemplateId::InitialProof, b,
                       step_key(iteration, "prove_lemma/" + std::to_string(m + 1)));
    auto proof = extract_proof(rec.response_text);
    if (!proof) continue;
    std::string body = proof_body(*proof);
    if (run.execute(stmt, body).passed()) verified.push_back(discovered_item(stmt, body));
  }

  // Refine existing lemmas.
  for (std::size_t m = 0; m < refine_candidates.size(); ++m) {
    const ContextItem* original = find_candidate(run, ctx, refine_candidates[m]);
    if (original == nullptr) continue;
    Bindings b = shared;
    b[Slot::LemmaToRefine] = format_lemma_with_proof(*original);
    auto rec = run.llm(TemplateId::RefineLemma, b,
                       step_key(iteration, "refine/" + std::to_string(m + 1)));
    auto refined = extract_lemma_with_proof(rec.response_text);
    if (!refined || novelty.redundant(refined->first)) continue;
    std::string stmt = novelty.named(run, refined->first);
    std::string body = proof_body(refined->second);
    if (!run.execute(stmt, body).passed()) continue;
    verified.push_back(discovered_item(stmt, body));
    novelty.accept(verified.back());
  }
  return verified;
}

std::vector<ContextItem> enrich_context(const GlobalContext& g, const WorkingContext& ctx,
                                        const std::vector<std::string>& keywords, std::size_t top_k,
                                        const std::string& exclude_name) {
  std::vector<ContextItem> out;
  if (keywords.empty()) return out;
  for (const auto* item : g.keyword_search(keywords)) {
    if (out.size() >= top_k) break;
    if (ctx.contains_name(item->name) || item->name == exclude_name) continue;
    out.push_back(*item);
  }
  return out;
}

std::string leverage_instruction(RegenMode mode, const std::vector<std::string>& names) {
  if (mode == RegenMode::Plain || names.empty()) return {};
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
  if (mode == RegenMode::WithNewLemmas)
    return "Leverage the new lemmas in your proof: " + list + ".";
  return "Leverage the newly retrieved context in your proof: " + list + ".";
}

std::optional<std::string> regenerate(RunState& run, const FailureReport& report,
                                      const WorkingContext& ctx, RegenMode mode,
                                      const std::vector<std::string>& new_names, int iteration) {
  Bindings b = merge(context_bindings(ctx), failure_bindings(report));
  b[Slot::Theorem] = run.theorem();
  RenderOptions options;
  options.extra_instruction = leverage_instruction(mode, new_names);
  auto rec = run.llm(TemplateId::Regenerate, b, step_key(iteration, "regenerate"), options);
  auto proof = extract_proof(rec.response_text);
  if (!proof) return std::nullopt;
  std::string body = proof_body(*proof);
  if (text::trim(body).empty()) return std::nullopt;
  return body;
}

}  // namespace refiner
