#include "refiner/llm/gateway.hpp"

#include <fstream>
#include <sstream>

#include "refiner/core/serialize.hpp"

namespace refiner {

ScenarioMiss::ScenarioMiss(const std::string& theorem, const std::string& key)
    : std::runtime_error("no scripted response for key '" + key + "'" +
                         (theorem.empty() ? "" : " (theorem " + theorem + ")")),
      key_(key) {}

std::size_t estimate_tokens(const std::string& text) { return (text.size() + 3) / 4; }

void StubScenario::add(StubRecord record) {
  auto id = std::make_pair(record.theorem, record.key);
  if (records_.count(id))
    throw std::invalid_argument("duplicate stub record for key " + record.key +
                                (record.theorem.empty() ? "" : " / " + record.theorem));
  records_.emplace(std::move(id), std::move(record));
}

const StubRecord* StubScenario::find(const std::string& theorem, const std::string& key) const {
  if (auto it = records_.find({theorem, key}); it != records_.end()) return &it->second;
  if (auto it = records_.find({"", key}); it != records_.end()) return &it->second;
  return nullptr;
}

StubScenario StubScenario::from_json_text(const std::string& text) {
  json j = json::parse(text);
  const json& list = j.is_array() ? j : j.at("records");
  StubScenario s;
  for (const auto& r : list) {
    StubRecord rec;
    rec.key = r.at("key").get<std::string>();
    rec.theorem = r.value("theorem", "");
    rec.response = r.at("response").get<std::string>();
    if (r.contains("input_tokens")) rec.input_tokens = r.at("input_tokens").get<std::size_t>();
    if (r.contains("output_tokens")) rec.output_tokens = r.at("output_tokens").get<std::size_t>();
    s.add(std::move(rec));
  }
  return s;
}

StubScenario StubScenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendError("cannot read stub scenario: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_json_text(ss.str());
  } catch (const json::exception& e) {
    throw BackendError("malformed stub scenario " + path.string() + ": " + e.what());
  }
}

LlmCallRecord StubBackend::complete(const Prompt& prompt, const CallKey& key,
                                    const CompletionParams&) {
  const StubRecord* rec = scenario_->find(key.theorem, key.key);
  if (!rec) throw ScenarioMiss(key.theorem, key.key);
  LlmCallRecord out;
  out.template_id = prompt.id;
  out.key = key.key;
  out.prompt_text = prompt.text();
  out.response_text = rec->response;
  out.input_tokens = rec->input_tokens.value_or(estimate_tokens(out.prompt_text));
  out.output_tokens = rec->output_tokens.value_or(estimate_tokens(out.response_text));
  return out;
}

LlmCallRecord Gateway::call(const Prompt& prompt, const CallKey& key) const {
  LlmCallRecord rec = backend_->complete(prompt, key, params_);
  rec.template_id = prompt.id;
  rec.key = key.key;
  return rec;
}

}  // namespace refiner
