#include "refiner/llm/http.hpp"

#include <thread>

#include <httplib.h>

namespace refiner {

json chat_request_body(const Prompt& prompt, const std::string& model,
                       const CompletionParams& params) {
  return {{"model", model},
          {"messages",
           json::array({{{"role", "system"}, {"content", prompt.system}},
                        {{"role", "user"}, {"content", prompt.user}}})},
          {"temperature", params.temperature},
          {"max_tokens", params.max_output_tokens}};
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  auto scheme_end = options_.url.find("://");
  if (scheme_end == std::string::npos)
    throw std::invalid_argument("endpoint URL needs a scheme: " + options_.url);
  auto path_start = options_.url.find('/', scheme_end + 3);
  origin_ = options_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : options_.url.substr(path_start);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (options_.url.rfind("https://", 0) == 0)
    throw std::invalid_argument("built without TLS support, cannot use " + options_.url);
#endif
  if (options_.max_in_flight < 1) throw std::invalid_argument("max_in_flight must be >= 1");
}

LlmCallRecord HttpBackend::complete(const Prompt& prompt, const CallKey& key,
                                    const CompletionParams& params) {
  {
    std::unique_lock lock(mutex_);
    slot_free_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    HttpBackend* self;
    ~Release() {
      {
        std::lock_guard lock(self->mutex_);
        --self->in_flight_;
      }
      self->slot_free_.notify_one();
    }
  } release{this};

  const std::string body = chat_request_body(prompt, options_.model, params).dump();
  httplib::Headers headers;
  if (!options_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::string last_error;
  auto delay = options_.backoff;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300));
    try {
      json j = json::parse(res->body);
      LlmCallRecord rec;
      rec.template_id = prompt.id;
      rec.key = key.key;
      rec.prompt_text = prompt.text();
      rec.response_text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      const json usage = j.value("usage", json::object());
      rec.input_tokens = usage.contains("prompt_tokens")
                             ? usage["prompt_tokens"].get<std::size_t>()
                             : estimate_tokens(rec.prompt_text);
      rec.output_tokens = usage.contains("completion_tokens")
                              ? usage["completion_tokens"].get<std::size_t>()
                              : estimate_tokens(rec.response_text);
      return rec;
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed completion response: ") + e.what());
    }
  }
  throw BackendError(last_error + " (after " + std::to_string(options_.max_retries + 1) +
                     " attempts)");
}

}  // namespace refiner
