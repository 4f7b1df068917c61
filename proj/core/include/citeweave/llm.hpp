#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "citeweave/error.hpp"

namespace citeweave::llm {

struct DecodingConfig {
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

struct BackendIdentity {
  std::string model;
  std::size_t context_budget_tokens = 8192;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

// A chat-completion service that answers one prompt with one reply.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string send(const std::string& prompt, const DecodingConfig& decoding) = 0;
  virtual BackendIdentity identity() const = 0;
};

// Lowercase hex SHA-256 of the prompt; the key of replay files.
std::string prompt_key(std::string_view prompt);

// Conservative token estimate: ceil(chars / chars_per_token).
std::size_t estimate_tokens(std::string_view text, std::size_t chars_per_token = 4);

// Canned replies keyed by prompt hash. File format:
//   {"model": "...", "context_budget_tokens": 8192,
//    "replies": {"<sha256 of prompt>": "<reply>", ...}}
class ReplayBackend final : public LlmBackend {
 public:
  explicit ReplayBackend(BackendIdentity identity = {"replay", 8192});
  ReplayBackend(ReplayBackend&& other) noexcept;

  static ReplayBackend from_file(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  void add(std::string_view prompt, std::string reply);
  void add_by_key(std::string key, std::string reply);
  std::size_t size() const;

  // Throws BackendError when the prompt has no recorded reply.
  std::string send(const std::string& prompt, const DecodingConfig& decoding) override;
  BackendIdentity identity() const override { return identity_; }

 private:
  BackendIdentity identity_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> replies_;
};

// Forwards to another backend and keeps every exchange as a replay file.
class RecordingBackend final : public LlmBackend {
 public:
  explicit RecordingBackend(LlmBackend& inner);

  std::string send(const std::string& prompt, const DecodingConfig& decoding) override;
  BackendIdentity identity() const override { return inner_.identity(); }
  const ReplayBackend& recorded() const noexcept { return recorded_; }

 private:
  LlmBackend& inner_;
  ReplayBackend recorded_;
};

struct ChatCompletionConfig {
  std::string base_url;  // e.g. "https://api.openai.com/v1"
  std::string model = "gpt-4";
  std::string api_key;
  std::chrono::seconds timeout{300};
  std::size_t context_budget_tokens = 8192;

  // CITEWEAVE_LLM_BASE_URL, CITEWEAVE_LLM_MODEL, CITEWEAVE_LLM_API_KEY,
  // CITEWEAVE_LLM_TIMEOUT (seconds), CITEWEAVE_LLM_CONTEXT_TOKENS.
  static ChatCompletionConfig from_env();
};

// OpenAI-compatible POST {base_url}/chat/completions with a single user
// message.
class ChatCompletionBackend final : public LlmBackend {
 public:
  explicit ChatCompletionBackend(ChatCompletionConfig config);

  std::string send(const std::string& prompt, const DecodingConfig& decoding) override;
  BackendIdentity identity() const override { return {config_.model, config_.context_budget_tokens}; }

 private:
  ChatCompletionConfig config_;
};

}  // namespace citeweave::llm
