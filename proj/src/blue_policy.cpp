#include "acd/blue_policy.hpp"

#include <algorithm>

namespace acd {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::sleep: return "sleep";
    case PolicyKind::reactive: return "reactive";
    case PolicyKind::remote: return "remote";
    case PolicyKind::llm: return "llm";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view text) {
  for (auto k : {PolicyKind::sleep, PolicyKind::reactive, PolicyKind::remote, PolicyKind::llm}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

Decision sleep_policy(const BlueObservation& observation) {
  return {AgentAction::sleep(observation.agent_name), "", true, "", false};
}

Decision SleepPolicy::decide(const BlueObservation& observation) { return sleep_policy(observation); }

Decision reactive_policy(const BlueObservation& obs, ReactiveMemory& memory, const ReactiveParams& params) {
  for (const auto& alert : obs.alerts) {
    switch (alert.severity) {
      case Severity::ADMIN: memory.admin_evidence.insert(alert.host); break;
      case Severity::USER: memory.user_evidence.insert(alert.host); break;
      case Severity::INFO: ++memory.info_counts[alert.host]; break;
    }
  }

  Decision d;
  d.action = AgentAction::sleep(obs.agent_name);
  if (obs.busy) {
    d.reason = "waiting for " + (obs.last_action ? obs.last_action->describe() : std::string("action")) + " to finish";
    return d;
  }

  auto act_on = [&](Verb verb, const std::string& host, std::string reason) {
    d.action = AgentAction::on_host(obs.agent_name, verb, host);
    d.reason = std::move(reason);
  };

  if (!memory.admin_evidence.empty()) {
    const std::string host = *memory.admin_evidence.begin();
    memory.admin_evidence.erase(host);
    memory.user_evidence.erase(host);
    memory.info_counts.erase(host);
    act_on(Verb::Restore, host, "ADMIN-level compromise confirmed on " + host);
    return d;
  }
  if (!memory.user_evidence.empty()) {
    const std::string host = *memory.user_evidence.begin();
    memory.user_evidence.erase(host);
    memory.info_counts.erase(host);
    act_on(Verb::Remove, host, "USER-level compromise confirmed on " + host);
    return d;
  }
  for (const auto& [host, count] : memory.info_counts) {
    if (count >= params.info_threshold) {
      const std::string target = host;
      memory.info_counts.erase(target);
      act_on(Verb::Analyse, target, std::to_string(count) + " INFO alerts on " + target);
      return d;
    }
  }

  const auto peers = peers_of(obs.agent);
  if (!obs.zones.empty()) {
    for (std::size_t k = 0; k < peers.size() && k < obs.comm_vectors.size(); ++k) {
      const int peer = peers[k];
      const auto report = decode(obs.comm_vectors[k]);
      auto zones = obs.peer_zones.find(peer);
      if (zones == obs.peer_zones.end() || zones->second.empty()) continue;
      if (report.level == ThreatLevel::admin && !memory.blocks.contains(peer)) {
        ZonePair pair{obs.zones.front(), zones->second.front()};
        memory.blocks[peer] = pair;
        d.action = AgentAction::on_zones(obs.agent_name, Verb::BlockTrafficZone, pair);
        d.reason = blue_agent_name(peer) + " reports admin-level compromise";
        return d;
      }
    }
    for (std::size_t k = 0; k < peers.size() && k < obs.comm_vectors.size(); ++k) {
      const int peer = peers[k];
      auto it = memory.blocks.find(peer);
      if (it == memory.blocks.end()) continue;
      if (decode(obs.comm_vectors[k]).level != ThreatLevel::admin) {
        d.action = AgentAction::on_zones(obs.agent_name, Verb::AllowTrafficZone, it->second);
        d.reason = blue_agent_name(peer) + " no longer reports admin-level compromise";
        memory.blocks.erase(it);
        return d;
      }
    }
  }
  return d;
}

CommReport comm_report_from_decision(const BlueObservation& post_step, const Decision& /*decision*/) {
  CommReport report;
  for (const auto& alert : post_step.alerts) {
    if (alert.source_zone) {
      for (const auto& [peer, zones] : post_step.peer_zones) {
        if (peer != post_step.agent && std::find(zones.begin(), zones.end(), *alert.source_zone) != zones.end()) {
          report.detections.insert(peer);
        }
      }
    }
    ThreatLevel level = ThreatLevel::scan;
    if (alert.severity == Severity::USER) level = ThreatLevel::user;
    if (alert.severity == Severity::ADMIN) level = ThreatLevel::admin;
    report.level = std::max(report.level, level);
  }
  report.busy = post_step.busy;
  return report;
}

}  // namespace acd
