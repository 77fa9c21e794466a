#include "acd/llm/llm_policy.hpp"

#include "acd/llm/observation_format.hpp"

namespace acd::llm {

LlmPolicy::LlmPolicy(std::shared_ptr<ChatClient> client, LlmConfig config, PromptStrategy strategy,
                     PromptTemplates templates, std::shared_ptr<EventLog> log)
    : client_(std::move(client)),
      config_(std::move(config)),
      strategy_(strategy),
      templates_(std::move(templates)),
      log_(std::move(log)),
      system_(system_prompt(strategy_, templates_)) {
  config_.validate();
}

Decision LlmPolicy::decide(const BlueObservation& obs) {
  PromptContext context{obs.hosts, obs.zones, obs.peer_zones, obs.unguarded_zones};
  auto messages = build_messages(strategy_, format_observation(obs), context, templates_, config_.token_budget);
  messages.system = system_;

  Decision out;
  out.truncated = messages.truncated();
  if (out.truncated) {
    ++truncations_;
    if (log_) {
      log_->append(obs.agent_name + " step " + std::to_string(obs.step) + ": prompt truncated, " +
                   std::to_string(messages.dropped_alerts) + " alert line(s) dropped");
    }
  }

  const auto outcome = query(config_, *client_, messages.system, messages.user, obs.agent_name, obs.step);
  if (!outcome.reply) {
    last_raw_.clear();
    ++invalid_;
    out.action = AgentAction::sleep(obs.agent_name);
    out.valid = false;
    out.error = "query failed after " + std::to_string(outcome.attempts) + " attempt(s): " + outcome.error;
    if (log_) log_->append(obs.agent_name + " step " + std::to_string(obs.step) + ": invalid action, " + out.error);
    return out;
  }

  last_raw_ = *outcome.reply;
  auto parsed = parse_decision(*outcome.reply, TargetCatalog::for_observation(obs), obs.agent_name);
  out.action = std::move(parsed.action);
  out.reason = std::move(parsed.reason);
  out.valid = parsed.valid;
  out.error = std::move(parsed.error);
  if (!out.valid) {
    ++invalid_;
    if (log_) log_->append(obs.agent_name + " step " + std::to_string(obs.step) + ": invalid action, " + out.error);
  }
  return out;
}

}  // namespace acd::llm
