#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>

#include "refiner/core/serialize.hpp"
#include "refiner/llm/gateway.hpp"

namespace refiner {

struct HttpBackendOptions {
  std::string url;  // chat-completions endpoint, e.g. https://host/v1/chat/completions
  std::string model;
  std::string api_key;  // sent as a bearer token when non-empty
  int max_retries = 2;
  std::chrono::milliseconds backoff{500};  // doubled after every failed try
  std::chrono::seconds timeout{120};
  int max_in_flight = 4;
};

// Request body for one single-turn chat completion.
json chat_request_body(const Prompt& prompt, const std::string& model,
                       const CompletionParams& params);

// Sends chat-completion requests. Safe to share between threads; at most
// max_in_flight requests are outstanding at once.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  LlmCallRecord complete(const Prompt& prompt, const CallKey& key,
                         const CompletionParams& params) override;

 private:
  HttpBackendOptions options_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
};

}  // namespace refiner
