#include "refiner/engine/engine.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "refiner/core/text.hpp"
#include "refiner/core/vernacular.hpp"
#include "refiner/llm/bindings.hpp"
#include "refiner/strategies/strategies.hpp"

namespace refiner {

Retrieval retrieve(const GlobalContext& g, const std::string& theorem, std::size_t top_k) {
  const std::string name = vernacular::item_name(theorem);
  return {g.bm25_top_k(theorem, top_k), g.most_similar_proof(theorem, name)};
}

WorkingContext context_initialize(const GlobalContext& g, const std::string& theorem,
                                  const FailureReport& report, const Retrieval& retrieval) {
  WorkingContext ctx;
  for (const auto* item : retrieval.lemmas) ctx.add_lemma(*item);
  if (retrieval.similar) ctx.set_similar_proof(*retrieval.similar);
  std::string scope = theorem;
  if (!report.stuck_state.goals.empty()) scope += "\n" + report.stuck_state.goals.front().conclusion;
  for (const auto* item : g.definitions_in(scope)) ctx.add_definition(*item);
  return ctx;
}

WorkingContext context_initialize(const GlobalContext& g, const std::string& theorem,
                                  const FailureReport& report, std::size_t top_k) {
  return context_initialize(g, theorem, report, retrieve(g, theorem, top_k));
}

std::vector<Strategy> enabled_strategies(const EngineConfig& config) {
  std::vector<Strategy> out;
  if (config.lemma_discovery_enabled()) out.push_back(Strategy::LemmaDiscovery);
  if (config.enrichment_enabled()) out.push_back(Strategy::ContextEnrichment);
  out.push_back(Strategy::Regeneration);
  return out;
}

std::uint64_t task_seed(std::uint64_t seed, const std::string& theorem_name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : theorem_name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return seed ^ h;
}

std::unique_ptr<DecisionMaker> make_decision_maker(const EngineConfig& config,
                                                   std::shared_ptr<const Gateway> gateway,
                                                   std::shared_ptr<const Classifier> classifier,
                                                   std::uint64_t seed) {
  switch (config.decision_maker) {
    case DecisionMakerKind::Llm: return std::make_unique<LlmDecisionMaker>(std::move(gateway));
    case DecisionMakerKind::Rule: return std::make_unique<RuleDecisionMaker>();
    case DecisionMakerKind::Random: return std::make_unique<RandomDecisionMaker>(seed);
    case DecisionMakerKind::Classifier:
      if (!classifier) classifier = std::make_shared<MajorityClassifier>();
      return std::make_unique<ClassifierDecisionMaker>(std::move(classifier));
  }
  throw std::invalid_argument("unknown decision-maker");
}

namespace {

std::vector<LlmCallSummary> summaries(const std::vector<LlmCallRecord>& calls) {
  std::vector<LlmCallSummary> out;
  for (const auto& c : calls)
    out.push_back({to_string(c.template_id), c.key, c.input_tokens, c.output_tokens});
  return out;
}

FailureReport no_proof_report(const std::string& theorem) {
  FailureReport r;
  r.error_message = "no proof produced";
  r.stuck_state = initial_state(theorem);
  return r;
}

bool is_enabled(const std::vector<Strategy>& enabled, Strategy s) {
  return std::find(enabled.begin(), enabled.end(), s) != enabled.end();
}

std::vector<std::string> names_of(const std::vector<ContextItem>& items) {
  std::vector<std::string> out;
  for (const auto& i : items) out.push_back(i.name);
  return out;
}

// Runs a produced proof and, when it passes, checks it again in a fresh
// session. Returns the failure report when either step rejects it.
std::optional<FailureReport> check(RunState& run, const std::string& proof) {
  auto outcome = run.execute(run.theorem(), proof);
  if (!outcome.passed()) return outcome.failure();
  auto fresh = run.verify_fresh(run.theorem(), proof);
  if (!fresh.passed()) return fresh.failure();
  return std::nullopt;
}

}  // namespace

RefinementTrace prove(const GlobalContext& g, const std::string& theorem,
                      const EngineConfig& config, const Gateway& gateway, const Prover& prover,
                      DecisionMaker& decision_maker) {
  RefinementTrace trace;
  std::string name = vernacular::item_name(theorem);
  trace.theorem = name.empty() ? text::normalize_ws(theorem) : name;
  RunState run(g, gateway, prover, config, theorem);
  const bool use_context = config.mode != EngineMode::SelfRefine;
  const std::vector<Strategy> enabled = enabled_strategies(config);

  bool in_loop = false;
  IterationRecord current;
  auto finish = [&](Outcome outcome) {
    trace.outcome = outcome;
    trace.retrieval_calls = run.retrieval_calls();
    trace.recompute_totals();
    return trace;
  };

  try {
    // Initial attempt.
    Retrieval retrieval;
    if (use_context) {
      retrieval = retrieve(g, theorem, static_cast<std::size_t>(config.top_k));
      run.count_retrieval();
    }
    Bindings initial = {{Slot::Theorem, theorem},
                        {Slot::Definitions, format_statements(g.definitions_in(theorem))},
                        {Slot::Lemmas, format_statements(retrieval.lemmas)}};
    auto rec = run.llm(TemplateId::InitialProof, initial, "iter0/initial");
    FailureReport report;
    auto proof = extract_proof(rec.response_text);
    std::string body = proof ? proof_body(*proof) : "";
    if (text::trim(body).empty()) {
      report = no_proof_report(theorem);
    } else if (auto failure = check(run, body)) {
      report = *failure;
    } else {
      auto acc = run.take_accounting();
      trace.initial = {summaries(acc.calls), acc.prover_calls, AttemptResult::Pass, ""};
      trace.final_proof = body;
      return finish(Outcome::Proved);
    }
    auto acc = run.take_accounting();
    trace.initial = {summaries(acc.calls), acc.prover_calls, AttemptResult::Fail,
                     report.error_message};

    WorkingContext ctx;
    if (use_context) ctx = context_initialize(g, theorem, report, retrieval);

    for (int i = 1; i <= config.iteration_limit; ++i) {
      in_loop = true;
      current = IterationRecord{};
      current.index = i;

      DecisionResult decided;
      if (config.mode == EngineMode::Adapt) {
        DecisionInput input{&g, theorem, &report, &ctx, i, enabled};
        decided = decision_maker.decide(input);
        for (const auto& c : decided.calls) run.record(c);
      }
      if (!is_enabled(enabled, decided.decision.strategy())) decided.decision = Decision::regeneration();
      current.decision = decided.decision;
      current.fallback = decided.fallback;

      std::optional<std::string> produced;
      switch (decided.decision.strategy()) {
        case Strategy::LemmaDiscovery: {
          auto lemmas = lemma_discovery(run, report, ctx, decided.decision.refine_candidates(), i);
          for (const auto& l : lemmas) {
            ctx.add_discovered(l);
            trace.discovered_lemmas.push_back(l);
          }
          run.extend_preamble(lemmas);
          current.new_items = names_of(lemmas);
          produced = regenerate(run, report, ctx, RegenMode::WithNewLemmas, current.new_items, i);
          break;
        }
        case Strategy::ContextEnrichment: {
          run.count_retrieval();
          auto items = enrich_context(g, ctx, decided.decision.keywords(),
                                      static_cast<std::size_t>(config.top_k), name);
          for (const auto& item : items) ctx.add(item);
          current.new_items = names_of(items);
          produced = regenerate(run, report, ctx, RegenMode::WithNewCtx, current.new_items, i);
          break;
        }
        case Strategy::Regeneration:
          produced = regenerate(run, report, ctx, RegenMode::Plain, {}, i);
          break;
      }

      std::optional<FailureReport> failure;
      if (produced) failure = check(run, *produced);
      auto step = run.take_accounting();
      current.llm_calls = summaries(step.calls);
      current.prover_calls = step.prover_calls;
      current.context_names = ctx.names();
      if (produced && !failure) {
        current.result = AttemptResult::Pass;
        trace.iterations.push_back(current);
        trace.final_proof = *produced;
        return finish(Outcome::Proved);
      }
      current.result = AttemptResult::Fail;
      if (failure) {
        report = *failure;
        current.error_message = report.error_message;
      } else {
        // Keep the previous report; there was nothing new to run.
        current.error_message = "no proof produced";
      }
      trace.iterations.push_back(current);
      in_loop = false;
    }
    return finish(Outcome::Exhausted);
  } catch (const std::exception& e) {
    if (!dynamic_cast<const BackendError*>(&e) && !dynamic_cast<const BackendUnavailable*>(&e) &&
        !dynamic_cast<const ScenarioMiss*>(&e))
      throw;
    auto acc = run.take_accounting();
    if (in_loop) {
      current.llm_calls = summaries(acc.calls);
      current.prover_calls = acc.prover_calls;
      current.result = AttemptResult::Fail;
      current.error_message = e.what();
      trace.iterations.push_back(current);
    } else {
      trace.initial = {summaries(acc.calls), acc.prover_calls, AttemptResult::Fail, e.what()};
    }
    trace.final_proof.reset();
    trace.error = e.what();
    return finish(Outcome::Error);
  }
}

namespace {

RefinementTrace error_trace(const std::string& name, const std::string& message) {
  RefinementTrace t;
  t.theorem = name;
  t.outcome = Outcome::Error;
  t.error = message;
  t.recompute_totals();
  return t;
}

RefinementTrace prove_named(const GlobalContext& corpus, const std::string& name,
                            const EngineConfig& config, std::shared_ptr<const Gateway> gateway,
                            const Prover& prover, const BatchOptions& options) {
  const ContextItem* item = corpus.find(name);
  if (item == nullptr) return error_trace(name, "unknown theorem: " + name);
  if (!is_provable(item->kind)) return error_trace(name, name + " is not a Lemma or Theorem");
  GlobalContext g = corpus.prefix_before(name);
  auto dm = make_decision_maker(config, gateway, options.classifier,
                                task_seed(config.rng_seed, name));
  return prove(g, item->statement, config, *gateway, prover, *dm);
}

}  // namespace

std::vector<RefinementTrace> prove_batch(const GlobalContext& corpus,
                                         const std::vector<std::string>& names,
                                         const EngineConfig& config,
                                         std::shared_ptr<const Gateway> gateway,
                                         const Prover& prover, const BatchOptions& options) {
  std::vector<RefinementTrace> traces(names.size());
  std::vector<std::exception_ptr> errors(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      try {
        traces[i] = prove_named(corpus, names[i], config, gateway, prover, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, names.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

BatchSummary summarize(const std::vector<RefinementTrace>& traces) {
  BatchSummary s;
  s.total = traces.size();
  if (traces.empty()) return s;
  double iters = 0, in = 0, out = 0;
  for (const auto& t : traces) {
    if (t.outcome == Outcome::Proved) ++s.proved;
    iters += static_cast<double>(t.totals.iterations_used);
    in += static_cast<double>(t.totals.input_tokens);
    out += static_cast<double>(t.totals.output_tokens);
  }
  const double n = static_cast<double>(traces.size());
  s.avg_iterations = iters / n;
  s.avg_input_tokens = in / n;
  s.avg_output_tokens = out / n;
  return s;
}

nlohmann::json to_json(const BatchSummary& s) {
  return {{"proved", s.proved},
          {"total", s.total},
          {"avg_iterations", s.avg_iterations},
          {"avg_input_tokens", s.avg_input_tokens},
          {"avg_output_tokens", s.avg_output_tokens}};
}

std::vector<IterationReport> aggregate(const std::vector<RefinementTrace>& traces) {
  int last = 0;
  for (const auto& t : traces) last = std::max(last, static_cast<int>(t.iterations.size()));
  std::vector<IterationReport> rows(static_cast<std::size_t>(last) + 1);
  for (int i = 0; i <= last; ++i) rows[static_cast<std::size_t>(i)].iteration = i;

  std::vector<std::map<Strategy, std::size_t>> counts(rows.size());
  std::vector<std::size_t> proved_at(rows.size(), 0);
  for (const auto& t : traces) {
    for (const auto& it : t.iterations) {
      auto k = static_cast<std::size_t>(it.index);
      if (k >= rows.size()) continue;
      ++rows[k].decisions;
      if (it.fallback) ++rows[k].fallbacks;
      ++counts[k][it.decision.strategy()];
    }
    if (t.outcome == Outcome::Proved) ++proved_at[t.totals.iterations_used];
  }
  std::size_t cumulative = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    cumulative += proved_at[k];
    rows[k].cumulative_success =
        traces.empty() ? 0.0
                       : 100.0 * static_cast<double>(cumulative) / static_cast<double>(traces.size());
    for (Strategy s : {Strategy::LemmaDiscovery, Strategy::ContextEnrichment, Strategy::Regeneration})
      rows[k].strategy_percent[s] =
          rows[k].decisions == 0 ? 0.0
                                 : 100.0 * static_cast<double>(counts[k][s]) /
                                       static_cast<double>(rows[k].decisions);
  }
  return rows;
}

nlohmann::json to_json(const std::vector<IterationReport>& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report) {
    nlohmann::json freq = nlohmann::json::object();
    for (const auto& [s, pct] : r.strategy_percent) freq[to_string(s)] = pct;
    rows.push_back({{"iteration", r.iteration},
                    {"decisions", r.decisions},
                    {"fallbacks", r.fallbacks},
                    {"strategy_percent", freq},
                    {"cumulative_success", r.cumulative_success}});
  }
  return rows;
}

}  // namespace refiner
