#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refiner/core/types.hpp"

namespace refiner {

// The executable is missing or the scenario file cannot be read.
class BackendUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProofOutcome {
 public:
  static ProofOutcome pass() { return ProofOutcome{}; }
  static ProofOutcome fail(FailureReport report) {
    ProofOutcome o;
    o.failure_ = std::move(report);
    return o;
  }

  bool passed() const { return !failure_.has_value(); }
  // Precondition: !passed().
  const FailureReport& failure() const { return *failure_; }

  bool operator==(const ProofOutcome&) const = default;

 private:
  std::optional<FailureReport> failure_;
};

struct StatementCheck {
  bool valid = false;
  std::string message;
};

// States observed while replaying tactic sentences. states[i] is the state
// before tactic i; the last entry is the state after the final tactic.
struct ReplayResult {
  std::vector<ProofState> states;
  std::optional<FailureReport> failure;
};

// A prover bound to one preamble. Not thread-safe; one session per task.
class ProverSession {
 public:
  explicit ProverSession(std::vector<ContextItem> preamble) : preamble_(std::move(preamble)) {}
  virtual ~ProverSession() = default;
  ProverSession(const ProverSession&) = delete;
  ProverSession& operator=(const ProverSession&) = delete;

  const std::vector<ContextItem>& preamble() const { return preamble_; }

  // Runs `script` as the proof of `theorem_statement`. Passing requires every
  // sentence to succeed and a Qed/Defined close with no goals left.
  virtual ProofOutcome execute_proof(const std::string& theorem_statement,
                                     const std::string& proof_script) = 0;

  // Type-checks a Lemma/Theorem sentence without keeping it.
  virtual StatementCheck validate_statement(const std::string& statement) = 0;

  // Replays tactic sentences (no closing sentence) and reports every
  // intermediate state.
  virtual ReplayResult replay(const std::string& theorem_statement,
                              const std::vector<std::string>& tactics) = 0;

  // execute_proof under the lemma's own statement. On success the lemma can be
  // appended to a preamble for later sessions.
  ProofOutcome verify_lemma(const std::string& statement, const std::string& proof) {
    return execute_proof(statement, proof);
  }

 private:
  std::vector<ContextItem> preamble_;
};

class Prover {
 public:
  virtual ~Prover() = default;
  virtual std::unique_ptr<ProverSession> open(std::vector<ContextItem> preamble) const = 0;
};

// FNV-1a over the whitespace-normalized preamble statements, hex encoded.
std::string preamble_hash(const std::vector<ContextItem>& preamble);

// The goal a statement opens before any tactic runs: binders before the
// colon become hypotheses, the rest is the conclusion.
ProofState initial_state(const std::string& statement);

// Sentences between the proof-open and the closing sentence, bullets kept.
// This is what replay() expects.
std::vector<std::string> body_sentences(const std::string& script);

// Sentences of a script that the prover treats as tactics: everything except
// the proof-open sentence, bullets, and the closing sentence.
std::vector<std::string> tactic_sentences(const std::string& script);

}  // namespace refiner
