#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>

#include "acd/blue_policy.hpp"
#include "acd/event_log.hpp"
#include "acd/llm/chat_client.hpp"
#include "acd/llm/decision.hpp"
#include "acd/llm/prompts.hpp"

namespace acd::llm {

/// Blue policy backed by a chat model: one system + user message pair per step.
/// The system message is built once and reused for the whole episode.
class LlmPolicy final : public BluePolicy {
 public:
  LlmPolicy(std::shared_ptr<ChatClient> client, LlmConfig config, PromptStrategy strategy,
            PromptTemplates templates = PromptTemplates::embedded(), std::shared_ptr<EventLog> log = nullptr);

  PolicyKind kind() const override { return PolicyKind::llm; }
  Decision decide(const BlueObservation& observation) override;

  const std::string& system_message() const { return system_; }
  int invalid_actions() const { return invalid_.load(); }
  int truncations() const { return truncations_.load(); }
  /// Raw reply of the most recent call (empty after a transport failure).
  const std::string& last_raw() const { return last_raw_; }

 private:
  std::shared_ptr<ChatClient> client_;
  LlmConfig config_;
  PromptStrategy strategy_;
  PromptTemplates templates_;
  std::shared_ptr<EventLog> log_;
  std::string system_;
  std::string last_raw_;
  std::atomic<int> invalid_{0};
  std::atomic<int> truncations_{0};
};

}  // namespace acd::llm
