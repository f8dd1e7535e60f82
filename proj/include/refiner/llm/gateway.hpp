#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refiner/llm/templates.hpp"

namespace refiner {

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScenarioMiss : public std::runtime_error {
 public:
  ScenarioMiss(const std::string& theorem, const std::string& key);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct CompletionParams {
  double temperature = 0.0;
  int max_output_tokens = 2048;
};

// Which call this is within a run. The stub backend answers by key; other
// backends ignore it.
struct CallKey {
  std::string theorem;
  std::string key;  // "iterN/<phase>[/m]"
};

struct LlmCallRecord {
  TemplateId template_id = TemplateId::InitialProof;
  std::string key;
  std::string prompt_text;
  std::string response_text;
  std::size_t input_tokens = 0;
  std::size_t output_tokens = 0;
};

// ceil(chars / 4), the fallback when no token counts are reported.
std::size_t estimate_tokens(const std::string& text);

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual LlmCallRecord complete(const Prompt& prompt, const CallKey& key,
                                 const CompletionParams& params) = 0;
};

// Canned responses keyed by call key, optionally scoped to one theorem. A
// scoped record wins over an unscoped one with the same key.
struct StubRecord {
  std::string key;
  std::string theorem;  // empty: any theorem
  std::string response;
  std::optional<std::size_t> input_tokens;
  std::optional<std::size_t> output_tokens;
};

class StubScenario {
 public:
  void add(StubRecord record);
  const StubRecord* find(const std::string& theorem, const std::string& key) const;
  std::size_t size() const { return records_.size(); }

  // Accepts {"records": [...]} or a bare array of records.
  static StubScenario from_json_text(const std::string& text);
  static StubScenario load(const std::filesystem::path& path);

 private:
  std::map<std::pair<std::string, std::string>, StubRecord> records_;
};

class StubBackend : public LlmBackend {
 public:
  explicit StubBackend(std::shared_ptr<const StubScenario> scenario)
      : scenario_(std::move(scenario)) {}
  LlmCallRecord complete(const Prompt& prompt, const CallKey& key,
                         const CompletionParams& params) override;

 private:
  std::shared_ptr<const StubScenario> scenario_;
};

// Renders a template and sends it. Stateless apart from the shared backend.
class Gateway {
 public:
  Gateway(std::shared_ptr<LlmBackend> backend, CompletionParams params, PromptBudgets budgets)
      : backend_(std::move(backend)), params_(params), budgets_(budgets) {}

  Prompt render(TemplateId id, const Bindings& bindings, const RenderOptions& options = {}) const {
    return refiner::render(id, bindings, budgets_, options);
  }
  LlmCallRecord call(const Prompt& prompt, const CallKey& key) const;
  LlmCallRecord call(TemplateId id, const Bindings& bindings, const CallKey& key,
                     const RenderOptions& options = {}) const {
    return call(render(id, bindings, options), key);
  }

  const PromptBudgets& budgets() const { return budgets_; }

 private:
  std::shared_ptr<LlmBackend> backend_;
  CompletionParams params_;
  PromptBudgets budgets_;
};

// First fenced code block, else the first "Proof." ... closing-terminator
// span. Empty results count as absent.
std::optional<std::string> extract_proof(const std::string& response);

// Lemma/Theorem sentences anywhere in the response, in order, deduplicated by
// whitespace-normalized text.
std::vector<std::string> extract_lemma_statements(const std::string& response);

// The first statement in the response together with the proof following it.
std::optional<std::pair<std::string, std::string>> extract_lemma_with_proof(
    const std::string& response);

// Drops a leading Lemma/Theorem sentence that responses often repeat before
// the proof, so only "Proof. ... Qed." remains.
std::string proof_body(const std::string& proof);

}  // namespace refiner
