#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refiner/prover/prover.hpp"

namespace refiner {

// Deterministic stand-in for a proof assistant, driven by a scenario document:
//
//   { "scripts":    [ {preamble_hash?, theorem?, script, outcome: pass|fail|timeout,
//                      requires?, erroneous_tactic?, error_message?,
//                      partial_proof?, stuck_state?} ],
//     "statements": [ {statement, valid, message?} ],
//     "replays":    [ {theorem, tactics: [...], states: [...]} ] }
//
// Scripts and statements are matched after whitespace/comment normalization.
// A script record only passes when every name in `requires` is in the
// session preamble, which is how discovered lemmas gate later proofs.
struct MockScenario {
  enum class Result { Pass, Fail, Timeout };

  struct Script {
    std::optional<std::string> preamble_hash;
    std::optional<std::string> theorem;
    std::string script;
    Result result = Result::Fail;
    std::vector<std::string> requires_names;
    std::optional<std::string> erroneous_tactic;
    std::string error_message;
    std::optional<std::string> partial_proof;
    std::optional<ProofState> stuck_state;
  };

  struct Statement {
    std::string statement;
    bool valid = true;
    std::string message;
  };

  struct Replay {
    std::string theorem;
    std::vector<std::string> tactics;
    std::vector<ProofState> states;
  };

  std::vector<Script> scripts;
  std::vector<Statement> statements;
  std::vector<Replay> replays;

  static MockScenario from_json(const nlohmann::json& j);
  // Throws BackendUnavailable when the file cannot be read or parsed.
  static MockScenario load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void merge(const MockScenario& other);
};

class MockProver : public Prover {
 public:
  explicit MockProver(MockScenario scenario)
      : scenario_(std::make_shared<const MockScenario>(std::move(scenario))) {}
  explicit MockProver(std::shared_ptr<const MockScenario> scenario)
      : scenario_(std::move(scenario)) {}

  std::unique_ptr<ProverSession> open(std::vector<ContextItem> preamble) const override;

 private:
  std::shared_ptr<const MockScenario> scenario_;
};

class MockSession : public ProverSession {
 public:
  MockSession(std::shared_ptr<const MockScenario> scenario, std::vector<ContextItem> preamble);

  ProofOutcome execute_proof(const std::string& theorem_statement,
                             const std::string& proof_script) override;
  StatementCheck validate_statement(const std::string& statement) override;
  ReplayResult replay(const std::string& theorem_statement,
                      const std::vector<std::string>& tactics) override;

 private:
  const MockScenario::Script* find_script(const std::string& theorem,
                                          const std::string& script) const;
  std::optional<ProofState> state_after(const std::string& theorem,
                                        const std::vector<std::string>& prefix) const;
  FailureReport failure_at(const std::string& theorem, const std::vector<std::string>& sentences,
                           std::size_t index, std::string message) const;

  std::shared_ptr<const MockScenario> scenario_;
  std::string hash_;
  // Names the preamble makes available, constructors included.
  std::set<std::string> known_;
};

}  // namespace refiner
