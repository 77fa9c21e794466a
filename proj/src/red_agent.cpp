#include "acd/red_agent.hpp"

#include <algorithm>
#include <vector>

namespace acd {

namespace {

/// Zone closeness to mission-critical assets; lower is closer.
int zone_rank(const std::string& host) {
  if (host.find("_operational_") != std::string::npos) return 0;
  if (host.find("_restricted_") != std::string::npos) return 1;
  if (host.starts_with("hq_")) return 2;
  return 3;
}

struct Candidates {
  std::vector<std::string> unknown;
  std::vector<std::string> exploitable;
  std::vector<std::string> users;
  std::vector<std::string> admins;
};

Candidates gather(const RedState& state, const RedObservation& visible) {
  Candidates c;
  for (const auto& h : visible.reachable) {
    if (state.withdrawn.contains(h)) continue;
    if (state.known_hosts.contains(h)) {
      c.exploitable.push_back(h);
    } else {
      c.unknown.push_back(h);
    }
  }
  for (const auto& [h, level] : state.footholds) {
    (level == Compromise::admin ? c.admins : c.users).push_back(h);
  }
  return c;
}

template <typename Pred>
std::vector<std::string> filter(const std::vector<std::string>& in, Pred pred) {
  std::vector<std::string> out;
  std::copy_if(in.begin(), in.end(), std::back_inserter(out), pred);
  return out;
}

/// Hosts with the lowest zone rank.
std::vector<std::string> closest(const std::vector<std::string>& in) {
  if (in.empty()) return {};
  int best = 4;
  for (const auto& h : in) best = std::min(best, zone_rank(h));
  return filter(in, [&](const std::string& h) { return zone_rank(h) == best; });
}

AgentAction on(Verb verb, const std::string& host, ScanMode mode = ScanMode::loud) {
  AgentAction a = AgentAction::on_host(std::string(kRedAgentName), verb, host);
  a.mode = mode;
  return a;
}

AgentAction idle() { return AgentAction::sleep(std::string(kRedAgentName)); }

FsmNode next_node(FsmNode node) {
  switch (node) {
    case FsmNode::recon: return FsmNode::exploit;
    case FsmNode::exploit: return FsmNode::escalate;
    case FsmNode::escalate: return FsmNode::act;
    default: return FsmNode::recon;
  }
}

/// Discover -> Exploit -> PrivilegeEscalate -> Impact, skipping inapplicable nodes.
AgentAction round_robin(RedState& state, const Candidates& c, EngineRng& rng, ScanMode mode) {
  FsmNode node = state.fsm_node == FsmNode::withdraw ? FsmNode::recon : state.fsm_node;
  for (int tries = 0; tries < 4; ++tries, node = next_node(node)) {
    std::optional<AgentAction> action;
    switch (node) {
      case FsmNode::recon:
        if (!c.unknown.empty()) action = on(Verb::Discover, rng.pick(c.unknown), mode);
        break;
      case FsmNode::exploit:
        if (!c.exploitable.empty()) action = on(Verb::Exploit, rng.pick(c.exploitable));
        break;
      case FsmNode::escalate:
        if (!c.users.empty()) action = on(Verb::PrivilegeEscalate, rng.pick(c.users));
        break;
      case FsmNode::act:
        if (!c.admins.empty()) action = on(Verb::Impact, rng.pick(c.admins));
        break;
      case FsmNode::withdraw:
        break;
    }
    if (action) {
      state.fsm_node = next_node(node);
      return *action;
    }
  }
  return idle();
}

AgentAction aggressive(RedState& state, const Candidates& c, EngineRng& rng, const RedAgentParams& params) {
  if (!c.unknown.empty()) {
    state.fsm_node = FsmNode::recon;
    return on(Verb::Discover, rng.pick(c.unknown), ScanMode::loud);
  }
  if (rng.bernoulli(params.aggressive_rescan)) {
    // Services on known hosts, footholds included, can change between scans.
    std::vector<std::string> known = c.exploitable;
    for (const auto& [h, level] : state.footholds) known.push_back(h);
    if (!known.empty()) {
      state.fsm_node = FsmNode::recon;
      return on(Verb::Discover, rng.pick(known), ScanMode::loud);
    }
  }
  if (state.fsm_node == FsmNode::recon) state.fsm_node = FsmNode::exploit;
  return round_robin(state, c, rng, ScanMode::loud);
}

AgentAction stealthy(RedState& state, const Candidates& c, const RedObservation& visible, EngineRng& rng,
                     const RedAgentParams& params) {
  if (state.footholds.size() >= 2) {
    std::string loudest;
    int worst = 0;
    for (const auto& [h, level] : state.footholds) {
      auto it = visible.exposure.find(h);
      const int count = it == visible.exposure.end() ? 0 : it->second;
      if (count >= params.withdraw_exposure && count > worst) {
        worst = count;
        loudest = h;
      }
    }
    if (!loudest.empty()) {
      state.fsm_node = FsmNode::withdraw;
      return on(Verb::Withdraw, loudest);
    }
  }
  return round_robin(state, c, rng, ScanMode::quiet);
}

AgentAction impact(RedState& state, const Candidates& c, const RedObservation& visible, EngineRng& rng) {
  auto critical = [&](const std::string& h) { return visible.critical_hosts.contains(h) && state.known_hosts.contains(h); };
  if (auto hosts = filter(c.admins, critical); !hosts.empty()) {
    state.fsm_node = FsmNode::act;
    return on(Verb::Impact, rng.pick(hosts));
  }
  if (auto hosts = filter(c.users, critical); !hosts.empty()) {
    state.fsm_node = FsmNode::escalate;
    return on(Verb::PrivilegeEscalate, rng.pick(hosts));
  }
  if (auto hosts = filter(c.exploitable, critical); !hosts.empty()) {
    state.fsm_node = FsmNode::exploit;
    return on(Verb::Exploit, rng.pick(hosts));
  }
  if (!c.unknown.empty()) {
    state.fsm_node = FsmNode::recon;
    return on(Verb::Discover, rng.pick(closest(c.unknown)), ScanMode::loud);
  }
  if (!c.exploitable.empty()) {
    state.fsm_node = FsmNode::exploit;
    return on(Verb::Exploit, rng.pick(closest(c.exploitable)));
  }
  if (!c.users.empty()) {
    state.fsm_node = FsmNode::escalate;
    return on(Verb::PrivilegeEscalate, rng.pick(c.users));
  }
  if (!c.admins.empty()) {
    state.fsm_node = FsmNode::act;
    return on(Verb::Impact, rng.pick(c.admins));
  }
  return idle();
}

AgentAction degrade(RedState& state, const Candidates& c, const RedObservation& visible, EngineRng& rng) {
  auto serving = [&](const std::string& h) { return visible.green_serving_hosts.contains(h); };
  std::vector<std::string> targets;
  for (const auto& [h, level] : state.footholds) {
    if (serving(h) && !visible.degraded.contains(h)) targets.push_back(h);
  }
  if (!targets.empty()) {
    state.fsm_node = FsmNode::act;
    return on(Verb::DegradeService, rng.pick(targets));
  }
  if (!c.exploitable.empty()) {
    auto preferred = filter(c.exploitable, serving);
    state.fsm_node = FsmNode::exploit;
    return on(Verb::Exploit, rng.pick(preferred.empty() ? c.exploitable : preferred));
  }
  if (!c.unknown.empty()) {
    state.fsm_node = FsmNode::recon;
    return on(Verb::Discover, rng.pick(c.unknown), ScanMode::loud);
  }
  if (!c.users.empty()) {
    state.fsm_node = FsmNode::escalate;
    return on(Verb::PrivilegeEscalate, rng.pick(c.users));
  }
  return idle();
}

}  // namespace

std::string_view to_string(RedVariant variant) {
  switch (variant) {
    case RedVariant::default_fsm: return "default";
    case RedVariant::aggressive: return "aggressive";
    case RedVariant::stealthy: return "stealthy";
    case RedVariant::impact: return "impact";
    case RedVariant::degrade: return "degrade";
  }
  return "?";
}

std::string_view to_string(FsmNode node) {
  switch (node) {
    case FsmNode::recon: return "recon";
    case FsmNode::exploit: return "exploit";
    case FsmNode::escalate: return "escalate";
    case FsmNode::act: return "act";
    case FsmNode::withdraw: return "withdraw";
  }
  return "?";
}

std::optional<RedVariant> parse_red_variant(std::string_view text) {
  for (auto v : {RedVariant::default_fsm, RedVariant::aggressive, RedVariant::stealthy, RedVariant::impact,
                 RedVariant::degrade}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

DetectionProfile detection_profile(RedVariant variant, const RedAgentParams& params) {
  if (variant == RedVariant::stealthy) return {ScanMode::quiet, std::max(params.stealth_interval, 1)};
  return {ScanMode::loud, 1};
}

AgentAction next_action(RedState& state, const RedObservation& visible, EngineRng& rng,
                        const RedAgentParams& params) {
  if (visible.last_action && visible.last_status == ActionStatus::success) {
    const auto* host = visible.last_action->host();
    if (host && visible.last_action->verb == Verb::Discover) state.known_hosts.insert(*host);
    if (host && visible.last_action->verb == Verb::Withdraw) state.withdrawn.insert(*host);
  }
  state.footholds = visible.footholds;
  for (const auto& [h, level] : state.footholds) {
    state.known_hosts.insert(h);
    state.withdrawn.erase(h);
  }
  if (state.footholds.empty()) return idle();

  const auto profile = detection_profile(state.variant, params);
  if (profile.interval > 1 && visible.step % profile.interval != 0) return idle();

  const Candidates c = gather(state, visible);
  switch (state.variant) {
    case RedVariant::aggressive: return aggressive(state, c, rng, params);
    case RedVariant::stealthy: return stealthy(state, c, visible, rng, params);
    case RedVariant::impact: return impact(state, c, visible, rng);
    case RedVariant::degrade: return degrade(state, c, visible, rng);
    case RedVariant::default_fsm: break;
  }
  return round_robin(state, c, rng, profile.scan_mode);
}

RedAgent::RedAgent(RedVariant variant, RedAgentParams params, std::uint64_t seed)
    : params_(params), rng_(seed) {
  state_.variant = variant;
}

}  // namespace acd
