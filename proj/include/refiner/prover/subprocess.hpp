#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "refiner/prover/prover.hpp"

namespace refiner {

struct SubprocessOptions {
  std::string executable = "coqtop";
  std::vector<std::string> args = {"-q", "-emacs"};
  std::string prompt_marker = "</prompt>";
  std::chrono::milliseconds script_timeout{60'000};
  std::chrono::milliseconds sentence_timeout{10'000};
};

// Parses the prover's goal display ("Show." output) into a ProofState.
// Accepts "No more goals." / "No more subgoals." and multi-goal listings where
// only the first goal shows its hypotheses.
ProofState parse_goals(const std::string& output);

// Drives an interactive prover process over pipes: one sentence per line,
// responses read up to the prompt marker, "Error" lines classify failures.
class SubprocessProver : public Prover {
 public:
  explicit SubprocessProver(SubprocessOptions options) : options_(std::move(options)) {}
  std::unique_ptr<ProverSession> open(std::vector<ContextItem> preamble) const override;

 private:
  SubprocessOptions options_;
};

}  // namespace refiner
