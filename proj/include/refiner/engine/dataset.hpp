#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "refiner/corpus/global_context.hpp"
#include "refiner/decision/decision.hpp"
#include "refiner/prover/prover.hpp"

namespace refiner {

// Proof file (relative path) -> names introduced in the same commit.
using CommitManifest = std::map<std::string, std::set<std::string>>;

// Accepts {"file.v": ["name", ...], ...}.
CommitManifest parse_commit_manifest(const std::string& json_text);

struct DatasetRow {
  std::string theorem;
  std::string tactic;
  LabeledExample example;
};

// Replays every proved Lemma/Theorem of `proofs` sentence by sentence and
// emits one row per tactic (bullets skipped). Features are computed against
// a working context rebuilt by retrieval over the project before the theorem,
// with the same-commit items held out; labels use the full project.
std::vector<DatasetRow> replay_dataset(const GlobalContext& project,
                                       const std::vector<SourceFile>& proofs,
                                       const CommitManifest& commits, const Prover& prover,
                                       std::size_t top_k);

}  // namespace refiner
