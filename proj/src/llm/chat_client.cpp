#include "acd/llm/chat_client.hpp"

#include <cstdlib>
#include <thread>

#include "acd/errors.hpp"
#include "acd/http.hpp"

namespace acd::llm {

void LlmConfig::validate() const {
  if (temperature < 0.0) throw ConfigError("llm.temperature", "must be >= 0");
  if (max_retries < 0) throw ConfigError("llm.max_retries", "must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("llm.timeout_ms", "must be positive");
}

nlohmann::json to_wire(const ChatRequest& request) {
  nlohmann::json body;
  body["model"] = request.model;
  body["temperature"] = request.temperature;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  return body;
}

std::string content_from_wire(const nlohmann::json& response) {
  try {
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("unexpected chat-completion response: ") + e.what());
  }
}

HttpChatClient::HttpChatClient(std::string endpoint, std::string api_key)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)) {}

HttpChatClient HttpChatClient::from_config(const LlmConfig& config) {
  std::string key;
  if (!config.api_key_env.empty()) {
    if (const char* v = std::getenv(config.api_key_env.c_str())) key = v;
  }
  return HttpChatClient(config.endpoint, key);
}

std::string HttpChatClient::complete(const ChatRequest& request, std::chrono::milliseconds timeout) {
  HttpHeaders headers;
  if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);
  const auto res = http_post_json(endpoint_, to_wire(request).dump(), headers, timeout);
  if (res.status < 200 || res.status >= 300) {
    throw TransportError("chat endpoint returned HTTP " + std::to_string(res.status));
  }
  auto body = nlohmann::json::parse(res.body, nullptr, false);
  if (body.is_discarded()) throw TransportError("chat endpoint returned non-JSON body");
  try {
    return content_from_wire(body);
  } catch (const FormatError& e) {
    throw TransportError(e.what());
  }
}

QueryOutcome query(const LlmConfig& config, ChatClient& client, const std::string& system_message,
                   const std::string& user_message, const std::string& agent, std::optional<int> step) {
  ChatRequest request;
  request.model = config.model;
  request.temperature = config.temperature;
  request.messages = {{"system", system_message}, {"user", user_message}};
  request.agent = agent;
  request.step = step;

  QueryOutcome out;
  const auto started = std::chrono::steady_clock::now();
  auto backoff = config.backoff;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    ++out.attempts;
    try {
      out.reply = client.complete(request, config.timeout);
      out.error.clear();
      break;
    } catch (const TransportError& e) {
      out.error = e.what();
    }
    if (attempt < config.max_retries && backoff.count() > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  out.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace acd::llm
