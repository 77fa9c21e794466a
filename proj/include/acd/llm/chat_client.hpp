#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace acd::llm {

struct LlmConfig {
  std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  double temperature = 1.0;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  /// First retry waits this long; each further retry doubles it.
  std::chrono::milliseconds backoff{200};
  /// Token budget for the per-step user message; 0 disables truncation.
  std::size_t token_budget = 2000;
  /// Environment variable holding the API key (sent as a bearer token if set).
  std::string api_key_env = "ACD_LLM_API_KEY";

  /// Throws ConfigError on negative temperature or retries.
  void validate() const;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  double temperature = 1.0;
  std::vector<ChatMessage> messages;
  /// Caller metadata (not sent over the wire).
  std::string agent;
  std::optional<int> step;
};

/// Request body in the common chat-completion shape.
nlohmann::json to_wire(const ChatRequest& request);
/// Extracts choices[0].message.content. Throws FormatError.
std::string content_from_wire(const nlohmann::json& response);

/// One chat-completion round trip. Implementations throw TransportError (or
/// TimeoutError) on failure and must be safe to call from several threads.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatRequest& request, std::chrono::milliseconds timeout) = 0;
};

class HttpChatClient final : public ChatClient {
 public:
  HttpChatClient(std::string endpoint, std::string api_key = {});
  /// Reads the key from config.api_key_env when present.
  static HttpChatClient from_config(const LlmConfig& config);

  std::string complete(const ChatRequest& request, std::chrono::milliseconds timeout) override;

 private:
  std::string endpoint_;
  std::string api_key_;
};

struct QueryOutcome {
  std::optional<std::string> reply;
  int attempts = 0;
  double latency_seconds = 0.0;
  std::string error;
};

/// Sends the system/user pair, retrying transport failures up to
/// config.max_retries times with exponential backoff. Never throws for
/// transport problems; an exhausted budget leaves `reply` empty.
QueryOutcome query(const LlmConfig& config, ChatClient& client, const std::string& system_message,
                   const std::string& user_message, const std::string& agent = {},
                   std::optional<int> step = std::nullopt);

}  // namespace acd::llm
