#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "acd/http.hpp"
#include "acd/llm/chat_client.hpp"

namespace acd::llm {

enum class FaultMode { none, malformed_json, prose, wrong_verb, timeout, transport_error };

std::string_view to_string(FaultMode mode);
std::optional<FaultMode> parse_fault_mode(std::string_view text);

/// Scripted replies and injected faults, keyed by agent name ("*" matches any
/// agent) and then by step. JSON form:
///   {"delay_ms": 0, "fault": "none",
///    "replies": {"*": {"3": "{...}"}}, "faults": {"blue_agent_0": {"5": "timeout"}}}
struct MockScript {
  std::chrono::milliseconds delay{0};
  /// Applied to every call that has no per-step entry.
  FaultMode fault = FaultMode::none;
  std::map<std::string, std::map<int, std::string>> replies;
  std::map<std::string, std::map<int, FaultMode>> faults;

  static MockScript from_json(const nlohmann::json& j);
  std::size_t fault_count(const std::string& agent, int steps) const;
};

/// Deterministic stand-in for a chat-completion model. Without a script entry
/// it reads the observation out of the user message and answers with a simple
/// evidence-driven rule set (restore admin hosts, remove user footholds,
/// analyse noisy hosts, block peers reporting admin compromise, otherwise lay
/// decoys). Per-agent state is kept behind a mutex, so concurrent calls for
/// different agents are safe.
class MockChatClient final : public ChatClient {
 public:
  explicit MockChatClient(MockScript script = {});

  std::string complete(const ChatRequest& request, std::chrono::milliseconds timeout) override;

  /// Reply to a message pair without faults or delay.
  std::string heuristic_reply(const std::string& agent, const std::string& user_message);

  int calls() const;

 private:
  MockScript script_;
  mutable std::mutex mu_;
  int calls_ = 0;
  std::map<std::string, int> per_agent_calls_;
  std::map<std::string, std::set<std::string>> decoyed_;
};

/// Agent name from a rendered user message ("Report for <name>:"), or "".
std::string agent_from_user_message(std::string_view user_message);

/// Serves MockChatClient over HTTP in the chat-completion wire format. Steps
/// are not on the wire, so script entries are matched against the per-agent
/// call index instead.
class MockChatServer {
 public:
  explicit MockChatServer(MockScript script = {});
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void serve_forever(const std::string& host, int port);
  void stop();
  int port() const { return server_.port(); }
  std::string url() const;

 private:
  std::pair<int, std::string> handle(const std::string& path, const std::string& body);

  std::shared_ptr<MockChatClient> client_;
  std::mutex mu_;
  std::map<std::string, int> call_index_;
  JsonHttpServer server_;
};

}  // namespace acd::llm
