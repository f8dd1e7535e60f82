#include "refiner/engine/dataset.hpp"

#include <nlohmann/json.hpp>

#include "refiner/engine/engine.hpp"
#include "refiner/prover/sentences.hpp"

namespace refiner {

CommitManifest parse_commit_manifest(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("commit manifest must map files to name lists");
  CommitManifest out;
  for (const auto& [file, names] : j.items())
    out[file] = names.get<std::set<std::string>>();
  return out;
}

std::vector<DatasetRow> replay_dataset(const GlobalContext& project,
                                       const std::vector<SourceFile>& proofs,
                                       const CommitManifest& commits, const Prover& prover,
                                       std::size_t top_k) {
  std::vector<DatasetRow> rows;
  GlobalContext source = GlobalContext::ingest(proofs);
  for (const auto& item : source.ordered()) {
    if (!is_provable(item.kind) || !item.proof) continue;
    std::set<std::string> boundary;
    if (auto it = commits.find(item.origin.path); it != commits.end()) boundary = it->second;

    GlobalContext before = project.contains(item.name) ? project.prefix_before(item.name) : project;
    GlobalContext held_out = before.filtered(
        [&](const ContextItem& i) { return !boundary.count(i.name) && i.name != item.name; });

    auto sentences = body_sentences(*item.proof);
    auto session = prover.open(before.ordered());
    ReplayResult replay = session->replay(item.statement, sentences);
    std::vector<std::string> done;
    for (std::size_t i = 0; i < sentences.size() && i < replay.states.size(); ++i) {
      const std::string& tactic = sentences[i];
      if (!is_bullet(tactic)) {
        FailureReport report;
        report.erroneous_tactic = tactic;
        report.partial_proof = join_sentences(done);
        report.stuck_state = replay.states[i];
        WorkingContext ctx = context_initialize(held_out, item.statement, report, top_k);
        LabeledExample ex{extract_features(before, report, ctx),
                          derive_label(tactic, before, boundary)};
        rows.push_back({item.name, tactic, ex});
      }
      done.push_back(tactic);
    }
  }
  return rows;
}

}  // namespace refiner
