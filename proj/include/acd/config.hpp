#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "acd/blue_policy.hpp"
#include "acd/engine.hpp"
#include "acd/llm/chat_client.hpp"
#include "acd/llm/mock_chat.hpp"
#include "acd/llm/prompts.hpp"
#include "acd/net_model.hpp"
#include "acd/red_agent.hpp"

namespace acd {

struct PolicyBinding {
  PolicyKind kind = PolicyKind::sleep;
  /// Artificial per-decision delay, used to emulate slow policies.
  int injected_delay_ms = 0;
  /// remote policies only
  std::string endpoint;
  int timeout_ms = 1000;
  ReactiveParams reactive;
};

struct LlmSettings {
  llm::LlmConfig config;
  llm::PromptStrategy strategy = llm::PromptStrategy::role_fewshot;
  /// Templates directory; empty uses the compiled-in copies.
  std::filesystem::path prompt_dir;
  /// In-process mock used unless a run explicitly opts into the HTTP endpoint.
  llm::MockScript mock;
};

struct ScenarioConfig {
  std::string name = "scenario";
  int hosts_per_zone = 2;
  int episodes = 2;
  int steps = 500;
  /// Defaults to thirds of `steps`.
  std::optional<int> mission_a_start;
  std::optional<int> mission_b_start;
  std::uint64_t seed = 0;
  RedVariant red_variant = RedVariant::default_fsm;
  RedAgentParams red_params;
  std::array<PolicyBinding, kBlueAgents> blue{};
  LlmSettings llm;
  EngineConfig engine;
  std::filesystem::path output_dir = "runs/scenario";
  /// Query the five blue policies concurrently within a step.
  bool parallel_decisions = true;
  /// Run episodes on separate threads.
  bool parallel_episodes = false;

  TopologyConfig topology() const;
  /// Throws ConfigError naming the first violated field.
  void validate() const;

  /// Unknown keys are rejected so typos do not silently fall back to defaults.
  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig load(const std::filesystem::path& path);
};

}  // namespace acd
