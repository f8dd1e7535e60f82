#include "refiner/prover/mock.hpp"

#include <algorithm>
#include <fstream>

#include "refiner/core/serialize.hpp"
#include "refiner/core/text.hpp"
#include "refiner/core/vernacular.hpp"
#include "refiner/prover/sentences.hpp"

namespace refiner {

namespace {

constexpr const char* kIncomplete = "Attempt to save an incomplete proof";
constexpr const char* kUnscripted = "unscripted";

MockScenario::Result result_from(const std::string& s) {
  std::string l = text::to_lower(s);
  if (l == "pass") return MockScenario::Result::Pass;
  if (l == "fail") return MockScenario::Result::Fail;
  if (l == "timeout") return MockScenario::Result::Timeout;
  throw std::invalid_argument("unknown scripted outcome: " + s);
}

const char* result_name(MockScenario::Result r) {
  switch (r) {
    case MockScenario::Result::Pass: return "pass";
    case MockScenario::Result::Fail: return "fail";
    case MockScenario::Result::Timeout: return "timeout";
  }
  return "fail";
}

std::vector<std::string> strip_proof_open(std::vector<std::string> sentences) {
  sentences.erase(std::remove_if(sentences.begin(), sentences.end(),
                                 [](const std::string& s) { return is_proof_open(s); }),
                  sentences.end());
  return sentences;
}

}  // namespace

MockScenario MockScenario::from_json(const nlohmann::json& j) {
  MockScenario sc;
  for (const auto& r : j.value("scripts", nlohmann::json::array())) {
    Script s;
    if (r.contains("preamble_hash")) s.preamble_hash = r["preamble_hash"].get<std::string>();
    if (r.contains("theorem")) s.theorem = text::normalize_ws(r["theorem"].get<std::string>());
    s.script = normalize_script(r.at("script").get<std::string>());
    s.result = result_from(r.at("outcome").get<std::string>());
    s.requires_names = r.value("requires", std::vector<std::string>{});
    if (r.contains("erroneous_tactic"))
      s.erroneous_tactic = text::normalize_ws(r["erroneous_tactic"].get<std::string>());
    s.error_message = r.value("error_message", std::string{});
    if (r.contains("partial_proof"))
      s.partial_proof = normalize_script(r["partial_proof"].get<std::string>());
    if (r.contains("stuck_state")) s.stuck_state = r["stuck_state"].get<ProofState>();
    if (s.result != Result::Pass && !s.partial_proof) {
      // Everything before the erroneous tactic (or before the first tactic).
      auto sentences = sentence_texts(s.script);
      std::size_t at = 0;
      if (s.erroneous_tactic) {
        auto it = std::find(sentences.begin(), sentences.end(), *s.erroneous_tactic);
        at = static_cast<std::size_t>(it - sentences.begin());
      } else {
        while (at < sentences.size() && is_proof_open(sentences[at])) ++at;
      }
      s.partial_proof = join_sentences({sentences.begin(), sentences.begin() + static_cast<std::ptrdiff_t>(std::min(at, sentences.size()))});
    }
    sc.scripts.push_back(std::move(s));
  }
  for (const auto& r : j.value("statements", nlohmann::json::array())) {
    Statement s;
    s.statement = text::normalize_ws(r.at("statement").get<std::string>());
    s.valid = r.at("valid").get<bool>();
    s.message = r.value("message", std::string{});
    sc.statements.push_back(std::move(s));
  }
  for (const auto& r : j.value("replays", nlohmann::json::array())) {
    Replay rp;
    rp.theorem = text::normalize_ws(r.at("theorem").get<std::string>());
    for (const auto& t : r.at("tactics")) rp.tactics.push_back(text::normalize_ws(t.get<std::string>()));
    rp.states = r.at("states").get<std::vector<ProofState>>();
    if (rp.states.size() != rp.tactics.size() + 1)
      throw std::invalid_argument("replay for '" + rp.theorem +
                                  "' needs one more state than tactics");
    sc.replays.push_back(std::move(rp));
  }
  return sc;
}

MockScenario MockScenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendUnavailable("cannot read prover scenario: " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    throw BackendUnavailable("malformed prover scenario " + path.string() + ": " + e.what());
  }
}

nlohmann::json MockScenario::to_json() const {
  nlohmann::json j;
  j["scripts"] = nlohmann::json::array();
  for (const auto& s : scripts) {
    nlohmann::json r{{"script", s.script}, {"outcome", result_name(s.result)}};
    if (s.preamble_hash) r["preamble_hash"] = *s.preamble_hash;
    if (s.theorem) r["theorem"] = *s.theorem;
    if (!s.requires_names.empty()) r["requires"] = s.requires_names;
    if (s.erroneous_tactic) r["erroneous_tactic"] = *s.erroneous_tactic;
    if (!s.error_message.empty()) r["error_message"] = s.error_message;
    if (s.partial_proof) r["partial_proof"] = *s.partial_proof;
    if (s.stuck_state) r["stuck_state"] = *s.stuck_state;
    j["scripts"].push_back(std::move(r));
  }
  j["statements"] = nlohmann::json::array();
  for (const auto& s : statements)
    j["statements"].push_back({{"statement", s.statement}, {"valid", s.valid}, {"message", s.message}});
  j["replays"] = nlohmann::json::array();
  for (const auto& r : replays)
    j["replays"].push_back({{"theorem", r.theorem}, {"tactics", r.tactics}, {"states", r.states}});
  return j;
}

void MockScenario::merge(const MockScenario& other) {
  scripts.insert(scripts.end(), other.scripts.begin(), other.scripts.end());
  statements.insert(statements.end(), other.statements.begin(), other.statements.end());
  replays.insert(replays.end(), other.replays.begin(), other.replays.end());
}

std::unique_ptr<ProverSession> MockProver::open(std::vector<ContextItem> preamble) const {
  return std::make_unique<MockSession>(scenario_, std::move(preamble));
}

MockSession::MockSession(std::shared_ptr<const MockScenario> scenario,
                         std::vector<ContextItem> preamble)
    : ProverSession(std::move(preamble)), scenario_(std::move(scenario)) {
  hash_ = preamble_hash(this->preamble());
  for (const auto& item : this->preamble())
    for (auto& n : vernacular::introduced_names(item)) known_.insert(std::move(n));
}

const MockScenario::Script* MockSession::find_script(const std::string& theorem,
                                                     const std::string& script) const {
  // Most specific match wins: theorem + preamble, theorem, preamble, wildcard.
  const MockScenario::Script* best = nullptr;
  int best_rank = -1;
  for (const auto& s : scenario_->scripts) {
    if (s.script != script) continue;
    if (s.theorem && *s.theorem != theorem) continue;
    if (s.preamble_hash && *s.preamble_hash != hash_) continue;
    int rank = (s.theorem ? 2 : 0) + (s.preamble_hash ? 1 : 0);
    if (rank > best_rank) {
      best = &s;
      best_rank = rank;
    }
  }
  return best;
}

std::optional<ProofState> MockSession::state_after(const std::string& theorem,
                                                   const std::vector<std::string>& prefix) const {
  std::vector<std::string> tactics = strip_proof_open(prefix);
  if (tactics.empty()) return initial_state(theorem);
  std::string key = join_sentences(tactics);
  for (const auto& s : scenario_->scripts) {
    if (s.theorem && *s.theorem != theorem) continue;
    if (!s.partial_proof || !s.stuck_state) continue;
    if (join_sentences(strip_proof_open(sentence_texts(*s.partial_proof))) == key)
      return s.stuck_state;
  }
  for (const auto& r : scenario_->replays) {
    if (r.theorem != theorem || tactics.size() > r.tactics.size()) continue;
    if (std::equal(tactics.begin(), tactics.end(), r.tactics.begin()))
      return r.states[tactics.size()];
  }
  return std::nullopt;
}

FailureReport MockSession::failure_at(const std::string& theorem,
                                      const std::vector<std::string>& sentences,
                                      std::size_t index, std::string message) const {
  FailureReport report;
  std::vector<std::string> prefix(sentences.begin(),
                                  sentences.begin() + static_cast<std::ptrdiff_t>(index));
  report.erroneous_tactic = index < sentences.size() ? sentences[index] : "Qed.";
  report.error_message = std::move(message);
  report.partial_proof = join_sentences(prefix);
  report.stuck_state = state_after(theorem, prefix).value_or(initial_state(theorem));
  return report;
}

ProofOutcome MockSession::execute_proof(const std::string& theorem_statement,
                                        const std::string& proof_script) {
  const std::string theorem = text::normalize_ws(theorem_statement);
  std::vector<std::string> sentences = sentence_texts(proof_script);
  if (sentences.empty() || !is_any_close(sentences.back())) sentences.push_back("Qed.");
  const std::string key = join_sentences(sentences);
  const std::size_t close = sentences.size() - 1;

  if (!is_accepting_close(sentences[close]))
    return ProofOutcome::fail(
        failure_at(theorem, sentences, close, "Proof closed with " + sentences[close] +
                                                  " Admitted and aborted proofs prove nothing."));

  const MockScenario::Script* rec = find_script(theorem, key);
  if (rec == nullptr) {
    bool has_tactics = std::any_of(sentences.begin(), sentences.end(), [](const std::string& s) {
      return !is_proof_open(s) && !is_bullet(s) && !is_any_close(s);
    });
    if (!has_tactics) return ProofOutcome::fail(failure_at(theorem, sentences, close, kIncomplete));
    std::size_t first = 0;
    while (first < close && is_proof_open(sentences[first])) ++first;
    return ProofOutcome::fail(failure_at(theorem, sentences, first, kUnscripted));
  }

  auto index_of = [&](const std::string& tactic) -> std::size_t {
    auto it = std::find(sentences.begin(), sentences.end(), tactic);
    return it == sentences.end() ? close : static_cast<std::size_t>(it - sentences.begin());
  };

  switch (rec->result) {
    case MockScenario::Result::Pass: {
      for (const auto& name : rec->requires_names) {
        if (known_.count(name)) continue;
        std::size_t at = close;
        for (std::size_t i = 0; i < sentences.size(); ++i) {
          auto toks = text::identifier_tokens(sentences[i]);
          if (std::find(toks.begin(), toks.end(), name) != toks.end()) {
            at = i;
            break;
          }
        }
        return ProofOutcome::fail(failure_at(
            theorem, sentences, at,
            "The reference " + name + " was not found in the current environment."));
      }
      return ProofOutcome::pass();
    }
    case MockScenario::Result::Fail:
    case MockScenario::Result::Timeout: {
      bool timeout = rec->result == MockScenario::Result::Timeout;
      std::size_t at = close;
      if (rec->erroneous_tactic) {
        at = index_of(*rec->erroneous_tactic);
      } else {
        at = 0;
        while (at < close && is_proof_open(sentences[at])) ++at;
      }
      std::string msg = timeout ? "timeout" : rec->error_message;
      FailureReport report = failure_at(theorem, sentences, at, msg);
      if (rec->erroneous_tactic) report.erroneous_tactic = *rec->erroneous_tactic;
      if (rec->partial_proof) report.partial_proof = *rec->partial_proof;
      if (rec->stuck_state) report.stuck_state = *rec->stuck_state;
      return ProofOutcome::fail(std::move(report));
    }
  }
  return ProofOutcome::fail(failure_at(theorem, sentences, 0, kUnscripted));
}

StatementCheck MockSession::validate_statement(const std::string& statement) {
  const std::string stmt = text::normalize_ws(statement);
  for (const auto& s : scenario_->statements)
    if (s.statement == stmt) return {s.valid, s.valid ? "" : s.message};

  auto kind = vernacular::classify(stmt);
  if (!kind || !is_provable(*kind)) return {false, "Syntax error: expected a Lemma or Theorem."};
  if (stmt.empty() || stmt.back() != '.') return {false, "Syntax error: '.' expected."};
  int depth = 0;
  for (char c : stmt) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) break;
  }
  if (depth != 0) return {false, "Syntax error: unbalanced parentheses."};
  std::string name = text::declared_name(stmt);
  if (name.empty()) return {false, "Syntax error: expected an identifier after the keyword."};
  if (known_.count(name)) return {false, name + " already exists."};
  if (stmt.find(':') == std::string::npos) return {false, "Syntax error: ':' expected."};

  std::set<std::string> bound;
  for (auto& n : vernacular::bound_names(stmt)) bound.insert(std::move(n));
  auto toks = text::identifier_tokens(stmt);
  // Skip the keyword and the name.
  for (std::size_t i = 2; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (!text::is_identifier(t) || t == name) continue;
    if (bound.count(t) || known_.count(t) || vernacular::is_prelude_name(t)) continue;
    return {false, "The reference " + t + " was not found in the current environment."};
  }
  return {true, ""};
}

ReplayResult MockSession::replay(const std::string& theorem_statement,
                                 const std::vector<std::string>& tactics) {
  const std::string theorem = text::normalize_ws(theorem_statement);
  std::vector<std::string> norm;
  for (const auto& t : tactics) norm.push_back(text::normalize_ws(t));
  ReplayResult out;
  for (std::size_t k = 0; k <= norm.size(); ++k) {
    std::vector<std::string> prefix(norm.begin(), norm.begin() + static_cast<std::ptrdiff_t>(k));
    auto state = state_after(theorem, prefix);
    if (!state) {
      out.failure = failure_at(theorem, norm, k - 1, kUnscripted);
      return out;
    }
    out.states.push_back(std::move(*state));
  }
  return out;
}

}  // namespace refiner
