#include "citeweave/llm.hpp"

#include <cstdio>
#include <cstdlib>

#include <httplib.h>
#include <openssl/evp.h>
#include <nlohmann/json.hpp>

#include "fs_util.hpp"

namespace citeweave::llm {

using nlohmann::json;

std::string prompt_key(std::string_view prompt) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(prompt.data(), prompt.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::size_t estimate_tokens(std::string_view text, std::size_t chars_per_token) {
  if (chars_per_token == 0) chars_per_token = 1;
  return (text.size() + chars_per_token - 1) / chars_per_token;
}

ReplayBackend::ReplayBackend(BackendIdentity identity) : identity_(std::move(identity)) {}

ReplayBackend::ReplayBackend(ReplayBackend&& other) noexcept : identity_(std::move(other.identity_)) {
  std::lock_guard guard(other.mutex_);
  replies_ = std::move(other.replies_);
}

ReplayBackend ReplayBackend::from_file(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(detail::read_file(path));
  } catch (const json::parse_error& e) {
    throw BackendError("replay file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("replies") || !j["replies"].is_object()) {
    throw BackendError("replay file " + path.string() + " needs a \"replies\" object");
  }
  ReplayBackend backend(
      BackendIdentity{j.value("model", std::string("replay")), j.value("context_budget_tokens", std::size_t{8192})});
  for (auto it = j["replies"].begin(); it != j["replies"].end(); ++it) {
    if (!it.value().is_string()) throw BackendError("replay reply for " + it.key() + " must be a string");
    backend.add_by_key(it.key(), it.value().get<std::string>());
  }
  return backend;
}

void ReplayBackend::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["model"] = identity_.model;
  j["context_budget_tokens"] = identity_.context_budget_tokens;
  {
    std::lock_guard guard(mutex_);
    j["replies"] = replies_;
  }
  detail::write_file_atomic(path, j.dump(2) + "\n");
}

void ReplayBackend::add(std::string_view prompt, std::string reply) { add_by_key(prompt_key(prompt), std::move(reply)); }

void ReplayBackend::add_by_key(std::string key, std::string reply) {
  std::lock_guard guard(mutex_);
  replies_[std::move(key)] = std::move(reply);
}

std::size_t ReplayBackend::size() const {
  std::lock_guard guard(mutex_);
  return replies_.size();
}

std::string ReplayBackend::send(const std::string& prompt, const DecodingConfig&) {
  const std::string key = prompt_key(prompt);
  std::lock_guard guard(mutex_);
  auto it = replies_.find(key);
  if (it == replies_.end()) throw BackendError("no recorded reply for prompt " + key);
  return it->second;
}

RecordingBackend::RecordingBackend(LlmBackend& inner) : inner_(inner), recorded_(inner.identity()) {}

std::string RecordingBackend::send(const std::string& prompt, const DecodingConfig& decoding) {
  std::string reply = inner_.send(prompt, decoding);
  recorded_.add(prompt, reply);
  return reply;
}

ChatCompletionConfig ChatCompletionConfig::from_env() {
  ChatCompletionConfig c;
  if (const char* v = std::getenv("CITEWEAVE_LLM_BASE_URL")) c.base_url = v;
  if (const char* v = std::getenv("CITEWEAVE_LLM_MODEL")) c.model = v;
  if (const char* v = std::getenv("CITEWEAVE_LLM_API_KEY")) c.api_key = v;
  if (const char* v = std::getenv("CITEWEAVE_LLM_TIMEOUT")) c.timeout = std::chrono::seconds(std::atol(v));
  if (const char* v = std::getenv("CITEWEAVE_LLM_CONTEXT_TOKENS")) {
    c.context_budget_tokens = static_cast<std::size_t>(std::atol(v));
  }
  return c;
}

ChatCompletionBackend::ChatCompletionBackend(ChatCompletionConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw PreconditionError("chat-completion base URL is not configured");
}

std::string ChatCompletionBackend::send(const std::string& prompt, const DecodingConfig& decoding) {
  const auto scheme = config_.base_url.find("://");
  const auto path_start = config_.base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  const std::string origin = config_.base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  json body;
  body["model"] = config_.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = decoding.temperature;
  if (decoding.max_tokens) body["max_tokens"] = *decoding.max_tokens;

  httplib::Client client(origin);
  client.set_read_timeout(config_.timeout.count(), 0);
  client.set_write_timeout(config_.timeout.count(), 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) throw BackendError("chat-completion request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw BackendError("chat-completion returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    const json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected chat-completion payload: ") + e.what());
  }
}

}  // namespace citeweave::llm
