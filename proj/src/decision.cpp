#include "refiner/decision/decision.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "refiner/core/text.hpp"
#include "refiner/core/vernacular.hpp"
#include "refiner/llm/bindings.hpp"

namespace refiner {

namespace {

bool is_decoration(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '`' || c == '\'' ||
         c == '"' || c == '#' || c == '>' || c == '-' || c == '_';
}

std::string strip_decoration(std::string s) {
  std::size_t b = 0;
  while (b < s.size() && is_decoration(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && (is_decoration(s[e - 1]) || s[e - 1] == '.')) --e;
  return s.substr(b, e - b);
}

bool strip_prefix_ci(std::string& s, std::string_view prefix) {
  if (s.size() < prefix.size() || text::to_lower(s.substr(0, prefix.size())) != prefix) return false;
  s = text::trim(s.substr(prefix.size()));
  return true;
}

std::optional<std::vector<std::string>> parse_list(std::string rest) {
  rest = text::trim(rest);
  if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']') return std::nullopt;
  std::string inner = rest.substr(1, rest.size() - 2);
  if (inner.find_first_of("[]") != std::string::npos) return std::nullopt;
  std::vector<std::string> out;
  std::stringstream ss(inner);
  for (std::string entry; std::getline(ss, entry, ',');) {
    entry = text::trim(entry);
    // Quoted entries lose their quotes; a lone trailing prime is part of a name.
    if (entry.size() >= 2 && entry.front() == entry.back() &&
        (entry.front() == '`' || entry.front() == '\'' || entry.front() == '"'))
      entry = text::trim(entry.substr(1, entry.size() - 2));
    if (!entry.empty()) out.push_back(entry);
  }
  return out;
}

std::optional<Decision> parse_line(const std::string& raw) {
  std::string line = strip_decoration(raw);
  // "1." / "2)" numbering.
  std::size_t d = 0;
  while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
  if (d > 0 && d < line.size() && (line[d] == '.' || line[d] == ')'))
    line = strip_decoration(line.substr(d + 1));
  for (std::string_view label : {"strategy:", "output format:", "decision:"})
    if (strip_prefix_ci(line, label)) line = strip_decoration(line);

  if (text::to_lower(line) == "regeneration") return Decision::regeneration();
  for (std::string_view head : {"lemma discovery", "context enrichment"}) {
    std::string rest = line;
    if (!strip_prefix_ci(rest, head)) continue;
    std::vector<std::string> items;
    if (!rest.empty()) {
      if (rest.front() != ';') return std::nullopt;
      auto list = parse_list(rest.substr(1));
      if (!list) return std::nullopt;
      items = std::move(*list);
    }
    return head == "lemma discovery" ? Decision::lemma_discovery(std::move(items))
                                     : Decision::context_enrichment(std::move(items));
  }
  return std::nullopt;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

const Goal* first_goal(const FailureReport& report) {
  return report.stuck_state.goals.empty() ? nullptr : &report.stuck_state.goals.front();
}

std::string hypotheses_text(const Goal* goal) {
  std::string out;
  if (!goal) return out;
  for (const auto& h : goal->hypotheses) out += h.type_text + "\n";
  return out;
}

std::set<std::string> definition_names(const GlobalContext& g, const std::string& s) {
  std::set<std::string> out;
  for (const auto* item : g.definitions_in(s)) out.insert(item->name);
  return out;
}

bool enabled_in(const std::vector<Strategy>& enabled, Strategy s) {
  return std::find(enabled.begin(), enabled.end(), s) != enabled.end();
}

std::vector<std::string> missing_lemmas(const GlobalContext& g, const WorkingContext& ctx) {
  std::vector<std::string> out;
  for (auto& name : similar_proof_lemmas(g, ctx))
    if (!ctx.contains_name(name)) out.push_back(std::move(name));
  return out;
}

std::vector<std::string> goal_definition_names(const GlobalContext& g, const FailureReport& report) {
  const Goal* goal = first_goal(report);
  std::vector<std::string> out;
  if (!goal) return out;
  for (const auto* item : g.definitions_in(goal->conclusion)) out.push_back(item->name);
  return out;
}

}  // namespace

Decision parse_decision(const std::string& text) {
  for (const auto& line : text::split_lines(text))
    if (auto d = parse_line(line)) return *d;
  throw DecisionParseError("no strategy line in response: " + text.substr(0, 200));
}

std::string format_decision(const Decision& d) {
  switch (d.strategy()) {
    case Strategy::LemmaDiscovery: return "Lemma Discovery; [" + join(d.refine_candidates()) + "]";
    case Strategy::ContextEnrichment: return "Context Enrichment; [" + join(d.keywords()) + "]";
    case Strategy::Regeneration: return "Regeneration";
  }
  return "Regeneration";
}

std::vector<std::string> similar_proof_lemmas(const GlobalContext& g, const WorkingContext& ctx) {
  std::vector<std::string> out;
  const auto& similar = ctx.similar_proof();
  if (!similar) return out;
  for (const auto& tok : text::identifier_tokens(similar->proof)) {
    const ContextItem* item = g.find(tok);
    if (item && is_provable(item->kind) && tok != similar->name &&
        std::find(out.begin(), out.end(), tok) == out.end())
      out.push_back(tok);
  }
  return out;
}

std::set<std::string> mentioned_definitions(const GlobalContext& g, const WorkingContext& ctx) {
  std::set<std::string> out;
  for (const auto* lemma : ctx.all_lemmas())
    for (const auto* d : g.definitions_in(lemma->statement)) out.insert(d->name);
  return out;
}

FeatureVector extract_features(const GlobalContext& g, const FailureReport& report,
                               const WorkingContext& ctx) {
  FeatureVector f;
  const Goal* goal = first_goal(report);
  auto in_goal = definition_names(g, goal ? goal->conclusion : "");
  auto in_hyps = definition_names(g, hypotheses_text(goal));
  auto mentioned = mentioned_definitions(g, ctx);
  f.f1 = in_goal.size();
  f.f2 = in_hyps.size();
  for (const auto& d : in_goal) {
    if (!in_hyps.count(d)) ++f.f3;
    if (!mentioned.count(d)) ++f.f4;
  }
  f.f5 = ctx.similar_proof() ? ctx.similar_proof()->score : 0.0;
  f.f6 = missing_lemmas(g, ctx).size();
  return f;
}

Strategy derive_label(const std::string& tactic, const GlobalContext& g,
                      const std::set<std::string>& commit_boundary) {
  bool existing = false;
  for (const auto& tok : text::identifier_tokens(tactic)) {
    const ContextItem* item = g.find(tok);
    if (!item || !is_provable(item->kind)) continue;
    if (commit_boundary.count(tok)) return Strategy::LemmaDiscovery;
    existing = true;
  }
  return existing ? Strategy::ContextEnrichment : Strategy::Regeneration;
}

void write_dataset(std::ostream& out, const std::vector<LabeledExample>& rows) {
  out << "f1,f2,f3,f4,f5,f6,label\n";
  for (const auto& r : rows) {
    const auto& f = r.features;
    std::ostringstream f5;
    f5 << std::setprecision(17) << f.f5;
    out << f.f1 << ',' << f.f2 << ',' << f.f3 << ',' << f.f4 << ',' << f5.str() << ',' << f.f6
        << ',' << to_string(r.label) << '\n';
  }
}

std::vector<LabeledExample> read_dataset(std::istream& in) {
  std::vector<LabeledExample> out;
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "f1,f2,f3,f4,f5,f6,label")
    throw std::invalid_argument("dataset header must be f1,f2,f3,f4,f5,f6,label");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(text::trim(c));
    if (cells.size() != 7)
      throw std::invalid_argument("dataset line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      LabeledExample e;
      e.features.f1 = std::stoul(cells[0]);
      e.features.f2 = std::stoul(cells[1]);
      e.features.f3 = std::stoul(cells[2]);
      e.features.f4 = std::stoul(cells[3]);
      e.features.f5 = std::stod(cells[4]);
      e.features.f6 = std::stoul(cells[5]);
      e.label = strategy_from_string(cells[6]);
      out.push_back(e);
    } catch (const std::exception& ex) {
      throw std::invalid_argument("dataset line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

MajorityClassifier MajorityClassifier::train(const std::vector<LabeledExample>& examples) {
  std::map<Strategy, std::size_t> counts;
  for (const auto& e : examples) ++counts[e.label];
  Strategy best = Strategy::Regeneration;
  std::size_t best_n = 0;
  for (const auto& [label, n] : counts)
    if (n > best_n) best = label, best_n = n;
  return MajorityClassifier(best);
}

Decision decide_rule(const GlobalContext& g, const FailureReport& report, const WorkingContext& ctx,
                     const std::vector<Strategy>& enabled) {
  if (enabled_in(enabled, Strategy::ContextEnrichment)) {
    auto missing = missing_lemmas(g, ctx);
    if (!missing.empty()) return Decision::context_enrichment(std::move(missing));
  }
  if (enabled_in(enabled, Strategy::LemmaDiscovery)) {
    const Goal* goal = first_goal(report);
    auto used = definition_names(g, (goal ? goal->conclusion : "") + "\n" + hypotheses_text(goal));
    auto mentioned = mentioned_definitions(g, ctx);
    for (const auto& d : used)
      if (!mentioned.count(d)) return Decision::lemma_discovery({});
  }
  return Decision::regeneration();
}

Decision decide_random(std::mt19937_64& rng, const GlobalContext& g, const FailureReport& report,
                       const std::vector<Strategy>& enabled) {
  if (enabled.empty()) return Decision::regeneration();
  std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
  switch (enabled[pick(rng)]) {
    case Strategy::LemmaDiscovery: return Decision::lemma_discovery({});
    case Strategy::ContextEnrichment:
      return Decision::context_enrichment(goal_definition_names(g, report));
    case Strategy::Regeneration: break;
  }
  return Decision::regeneration();
}

DecisionResult decide_llm(const Gateway& gateway, const DecisionInput& in) {
  Bindings b = merge(context_bindings(*in.ctx), failure_bindings(*in.report));
  b[Slot::Theorem] = in.theorem;
  RenderOptions options;
  options.strategies = in.enabled;
  const std::string name = vernacular::item_name(in.theorem);
  const std::string key = "iter" + std::to_string(in.iteration) + "/decide";

  DecisionResult result;
  result.calls.push_back(gateway.call(TemplateId::Decide, b, {name, key}, options));
  try {
    result.decision = parse_decision(result.calls.back().response_text);
    return result;
  } catch (const DecisionParseError&) {
  }
  options.extra_instruction =
      "Your previous reply did not follow any of the output formats. Reply with exactly one "
      "line in one of the output formats listed below.";
  result.calls.push_back(gateway.call(TemplateId::Decide, b, {name, key + "/1"}, options));
  try {
    result.decision = parse_decision(result.calls.back().response_text);
  } catch (const DecisionParseError&) {
    result.decision = Decision::regeneration();
    result.fallback = true;
  }
  return result;
}

DecisionResult ClassifierDecisionMaker::decide(const DecisionInput& in) {
  Strategy label = model_->predict(extract_features(*in.g, *in.report, *in.ctx));
  DecisionResult r;
  if (!enabled_in(in.enabled, label)) label = Strategy::Regeneration;
  switch (label) {
    case Strategy::LemmaDiscovery: r.decision = Decision::lemma_discovery({}); break;
    case Strategy::ContextEnrichment: {
      auto keywords = missing_lemmas(*in.g, *in.ctx);
      if (keywords.empty()) keywords = goal_definition_names(*in.g, *in.report);
      r.decision = Decision::context_enrichment(std::move(keywords));
      break;
    }
    case Strategy::Regeneration: r.decision = Decision::regeneration(); break;
  }
  return r;
}

}  // namespace refiner
