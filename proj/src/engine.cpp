#include "acd/engine.hpp"

#include <algorithm>

#include "acd/errors.hpp"
#include "acd/hashing.hpp"

namespace acd {

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::INFO: return "INFO";
    case Severity::USER: return "USER";
    case Severity::ADMIN: return "ADMIN";
  }
  return "?";
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (auto s : {Severity::INFO, Severity::USER, Severity::ADMIN}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

void RewardWeights::validate() const {
  auto check = [](double w, const char* name) {
    if (w < 0.0) throw ConfigError(std::string("rewards.") + name, "weight must be non-negative");
  };
  check(green, "green");
  check(impact, "impact");
  check(impact_critical, "impact_critical");
  check(restore, "restore");
  check(block, "block");
  for (double m : phase_multiplier) check(m, "phase_multiplier");
}

RewardRecord reward(const StepEvents& events, const RewardWeights& weights) {
  weights.validate();
  RewardRecord r;
  r.step = events.step;
  r.green_failures = events.green_failures;
  r.block_denials = events.block_denials;
  r.restore_downtime_penalties = static_cast<int>(events.hosts_down.size());
  for (const auto& impact : events.impacts) {
    ++r.impact_penalties;
    if (impact.critical) ++r.critical_impacts;
  }
  const double raw = weights.green * r.green_failures +
                     weights.impact * (r.impact_penalties - r.critical_impacts) +
                     weights.impact_critical * r.critical_impacts +
                     weights.restore * r.restore_downtime_penalties + weights.block * r.block_denials;
  const double scaled = weights.phase_multiplier[static_cast<std::size_t>(events.phase)] * raw;
  r.total = scaled == 0.0 ? 0.0 : -scaled;
  return r;
}

Engine::Engine(NetworkState initial, EngineConfig config, std::uint64_t seed)
    : state_(std::move(initial)), config_(std::move(config)), rng_(seed) {
  config_.weights.validate();
  last_status_.fill(ActionStatus::unknown);
}

ConnectivityPolicy Engine::current_policy() const {
  const int step = std::min(step_, state_.phases.episode_length - 1);
  return connectivity(state_, phase_at(step, state_.phases));
}

bool Engine::guards_host(int agent, const std::string& host) const {
  auto g = state_.guardian_of_host(host);
  return g && *g == agent;
}

void Engine::clear_red(Host& host) {
  host.compromise = Compromise::clean;
  host.degraded = false;
  withdrawn_.erase(host.id);
}

std::optional<std::string> Engine::free_decoy_slot(const Host& host) const {
  for (const auto& name : state_.decoy_pool) {
    if (!host.decoys.contains(name) && !host.services.contains(name)) return name;
  }
  return std::nullopt;
}

std::optional<std::string> Engine::source_zone_for(const std::string& target_zone,
                                                   const ConnectivityPolicy& policy) const {
  for (const auto& h : state_.hosts) {
    if (h.compromise == Compromise::clean || withdrawn_.contains(h.id) || !h.available_at(step_)) continue;
    if (policy.permits(h.zone, target_zone)) return h.zone;
  }
  return std::nullopt;
}

BlueObservation Engine::initial_observation(int agent) const { return make_observation(agent, 0); }

BlueObservation Engine::make_observation(int agent, int next_step) const {
  BlueObservation obs;
  const auto idx = static_cast<std::size_t>(agent);
  obs.agent = agent;
  obs.agent_name = blue_agent_name(agent);
  obs.step = next_step;
  obs.phase = phase_at(std::min(next_step, state_.phases.episode_length - 1), state_.phases);
  obs.last_action = last_action_[idx];
  obs.last_status = last_status_[idx];
  obs.busy = pending_[idx].has_value();
  obs.alerts = last_alerts_[idx];
  obs.zones = state_.zones_of(agent);
  obs.hosts = state_.hosts_of(agent);
  for (int peer = 0; peer < kBlueAgents; ++peer) {
    if (peer != agent) obs.peer_zones[peer] = state_.zones_of(peer);
  }
  for (const auto& z : state_.zones) {
    if (!z.guardian) obs.unguarded_zones.push_back(z.id);
  }
  return obs;
}

RedObservation Engine::red_observation() const {
  RedObservation obs;
  obs.step = step_;
  obs.phase = phase_at(std::min(step_, state_.phases.episode_length - 1), state_.phases);
  obs.last_action = red_last_action_;
  obs.last_status = red_last_status_;
  obs.exposure = exposure_;
  std::set<std::string> foothold_zones;
  for (const auto& h : state_.hosts) {
    if (h.critical) obs.critical_hosts.insert(h.id);
    if (h.services.contains("http")) obs.green_serving_hosts.insert(h.id);
    if (h.degraded) obs.degraded.insert(h.id);
    if (h.compromise != Compromise::clean && !withdrawn_.contains(h.id) && h.available_at(step_)) {
      obs.footholds[h.id] = h.compromise;
      foothold_zones.insert(h.zone);
    }
  }
  const auto policy = current_policy();
  for (const auto& h : state_.hosts) {
    if (obs.footholds.contains(h.id)) continue;
    bool reachable = std::any_of(foothold_zones.begin(), foothold_zones.end(),
                                 [&](const std::string& z) { return policy.permits(z, h.zone); });
    if (reachable) obs.reachable.push_back(h.id);
  }
  return obs;
}

ActionStatus Engine::resolve_red_action(const AgentAction& action, StepEvents& events) {
  if (action.verb == Verb::Sleep) return ActionStatus::success;
  const std::string* target = action.host();
  Host* host = target ? state_.find_host(*target) : nullptr;
  if (!host) return ActionStatus::failure;
  const bool foothold = host->compromise != Compromise::clean && !withdrawn_.contains(host->id);

  switch (action.verb) {
    case Verb::Discover:
    case Verb::Exploit: {
      if (!host->available_at(step_)) return ActionStatus::failure;
      const auto source = source_zone_for(host->zone, current_policy());
      if (!source) return ActionStatus::failure;
      StepEvents::Probe probe;
      probe.verb = action.verb;
      probe.host = host->id;
      probe.source_zone = *source;
      probe.mode = action.mode;
      if (action.verb == Verb::Discover) {
        events.red_probe = probe;
        return ActionStatus::success;
      }
      if (host->compromise != Compromise::clean) return ActionStatus::failure;
      std::vector<std::string> surface(host->services.begin(), host->services.end());
      surface.insert(surface.end(), host->decoys.begin(), host->decoys.end());
      if (surface.empty()) return ActionStatus::failure;
      probe.service = rng_.pick(surface);
      probe.decoy_hit = host->decoys.contains(probe.service);
      events.red_probe = probe;
      if (probe.decoy_hit) return ActionStatus::failure;
      if (!rng_.bernoulli(config_.probabilities.exploit_success)) return ActionStatus::failure;
      host->compromise = Compromise::user;
      return ActionStatus::success;
    }
    case Verb::PrivilegeEscalate:
      if (!foothold || host->compromise != Compromise::user || !host->available_at(step_)) {
        return ActionStatus::failure;
      }
      host->compromise = Compromise::admin;
      events.red_host_action = StepEvents::HostAction{Verb::PrivilegeEscalate, host->id};
      return ActionStatus::success;
    case Verb::Impact:
      if (!foothold || host->compromise != Compromise::admin || !host->available_at(step_)) {
        return ActionStatus::failure;
      }
      events.impacts.push_back({host->id, host->critical});
      events.red_host_action = StepEvents::HostAction{Verb::Impact, host->id};
      return ActionStatus::success;
    case Verb::DegradeService:
      if (!foothold || !host->available_at(step_)) return ActionStatus::failure;
      host->degraded = true;
      events.red_host_action = StepEvents::HostAction{Verb::DegradeService, host->id};
      return ActionStatus::success;
    case Verb::Withdraw:
      if (!foothold) return ActionStatus::failure;
      withdrawn_.insert(host->id);
      return ActionStatus::success;
    default:
      return ActionStatus::failure;
  }
}

GreenOutcome Engine::resolve_green(StepEvents& events) {
  GreenOutcome out;
  const auto phase = phase_at(std::min(step_, state_.phases.episode_length - 1), state_.phases);
  const auto permitted = mission_allowed_pairs(state_, phase);
  const auto& p = config_.probabilities;

  for (std::size_t i = 0; i < state_.hosts.size(); ++i) {
    const Host& own = state_.hosts[i];
    const std::string green = "green_" + own.id;
    if (!own.available_at(step_)) {
      ++out.failures;
      ++events.green_failures;
    } else if (rng_.bernoulli(p.green_access)) {
      std::vector<std::size_t> targets;
      for (std::size_t j = 0; j < state_.hosts.size(); ++j) {
        const auto& zone = state_.hosts[j].zone;
        if (j != i && (zone == own.zone || permitted.contains(ZonePair{own.zone, zone}))) targets.push_back(j);
      }
      if (!targets.empty()) {
        const Host& target = state_.hosts[rng_.pick(targets)];
        if (!target.available_at(step_) || target.degraded) {
          ++out.failures;
          ++events.green_failures;
          if (target.available_at(step_)) events.service_failures.push_back(target.id);
        } else if (target.zone != own.zone && state_.blocked.contains(ZonePair{own.zone, target.zone})) {
          ++out.failures;
          ++out.block_denials;
          ++events.block_denials;
        } else {
          events.green_activity.push_back({green, target.id, own.zone});
        }
      }
    } else {
      events.green_activity.push_back({green, own.id, own.zone});
    }

    if (rng_.bernoulli(p.p_phish)) {
      std::vector<std::size_t> clean;
      for (std::size_t j = 0; j < state_.hosts.size(); ++j) {
        if (state_.hosts[j].compromise == Compromise::clean && state_.hosts[j].available_at(step_)) {
          clean.push_back(j);
        }
      }
      if (!clean.empty()) {
        Host& victim = state_.hosts[rng_.pick(clean)];
        victim.compromise = Compromise::user;
        out.phishing_grants.push_back(victim.id);
      }
    }
  }
  events.phishing_grants.insert(events.phishing_grants.end(), out.phishing_grants.begin(),
                                out.phishing_grants.end());
  return out;
}

ActionStatus Engine::resolve_blue_action(int agent, const AgentAction& action, StepEvents& events) {
  const auto idx = static_cast<std::size_t>(agent);
  const auto& d = config_.durations;

  auto start = [&](int duration) {
    if (duration <= 1) return complete_blue_action(agent, action, events);
    pending_[idx] = Pending{action, duration - 1};
    return ActionStatus::in_progress;
  };

  switch (action.verb) {
    case Verb::Sleep:
    case Verb::Monitor:
      return ActionStatus::success;
    case Verb::BlockTrafficZone:
    case Verb::AllowTrafficZone: {
      const ZonePair* pair = action.zones();
      if (!pair || pair->first == pair->second) return ActionStatus::failure;
      const Zone* a = state_.find_zone(pair->first);
      const Zone* b = state_.find_zone(pair->second);
      if (!a || !b || (a->guardian != agent && b->guardian != agent)) return ActionStatus::failure;
      if (action.verb == Verb::BlockTrafficZone) {
        state_.blocked.insert(*pair);
      } else {
        state_.blocked.erase(*pair);
      }
      return ActionStatus::success;
    }
    default:
      break;
  }

  const std::string* target = action.host();
  Host* host = target ? state_.find_host(*target) : nullptr;
  if (!host || !guards_host(agent, host->id) || !host->available_at(step_)) return ActionStatus::failure;

  switch (action.verb) {
    case Verb::Analyse:
      return start(d.analyse);
    case Verb::DeployDecoy:
      if (!free_decoy_slot(*host)) return ActionStatus::failure;
      return start(d.deploy_decoy);
    case Verb::Remove:
      if (host->compromise == Compromise::admin) return ActionStatus::failure;
      clear_red(*host);
      return ActionStatus::success;
    case Verb::Restore:
      clear_red(*host);
      host->decoys.clear();
      host->unavailable_since = step_;
      host->unavailable_until = step_ + std::max(d.restore, 1) + std::max(d.restore_downtime, 0);
      return start(d.restore);
    default:
      return ActionStatus::failure;
  }
}

ActionStatus Engine::complete_blue_action(int agent, const AgentAction& action, StepEvents& events) {
  Host* host = action.host() ? state_.find_host(*action.host()) : nullptr;
  if (!host) return ActionStatus::failure;
  switch (action.verb) {
    case Verb::Analyse:
      if (!host->available_at(step_)) return ActionStatus::failure;
      events.analyse_findings.push_back({agent, host->id, host->compromise});
      return ActionStatus::success;
    case Verb::DeployDecoy: {
      if (!host->available_at(step_)) return ActionStatus::failure;
      auto slot = free_decoy_slot(*host);
      if (!slot) return ActionStatus::failure;
      host->decoys.insert(*slot);
      return ActionStatus::success;
    }
    case Verb::Restore:
      return ActionStatus::success;
    default:
      return ActionStatus::failure;
  }
}

std::vector<Alert> Engine::generate_alerts(const StepEvents& events) {
  std::vector<Alert> alerts;
  const auto& p = config_.probabilities;
  auto emit = [&](const std::string& host, Severity severity, std::optional<std::string> source,
                  std::string description) {
    auto guardian = state_.guardian_of_host(host);
    if (!guardian) return;
    alerts.push_back({events.step, *guardian, host, severity, std::move(source), std::move(description)});
    ++exposure_[host];
  };

  if (events.red_probe && state_.guardian_of_host(events.red_probe->host)) {
    const auto& probe = *events.red_probe;
    if (probe.verb == Verb::Discover) {
      const double chance = probe.mode == ScanMode::quiet ? p.detect_scan_quiet : p.detect_scan;
      if (rng_.bernoulli(chance)) {
        emit(probe.host, Severity::INFO, probe.source_zone,
             "Network scan against " + probe.host + " from zone " + probe.source_zone);
      }
    } else if (probe.decoy_hit) {
      if (rng_.bernoulli(p.decoy_detection)) {
        emit(probe.host, Severity::INFO, probe.source_zone,
             "Decoy service " + probe.service + " on " + probe.host + " accessed from zone " + probe.source_zone);
      }
    } else if (rng_.bernoulli(p.detect_exploit)) {
      emit(probe.host, Severity::INFO, probe.source_zone,
           "Suspicious connection to " + probe.host + " from zone " + probe.source_zone);
    }
  }

  if (events.red_host_action && rng_.bernoulli(p.detect_host_action)) {
    const auto& act = *events.red_host_action;
    const char* what = act.verb == Verb::PrivilegeEscalate ? "Privilege change"
                       : act.verb == Verb::DegradeService  ? "Service degradation"
                                                           : "Service disruption";
    emit(act.host, Severity::INFO, std::nullopt, std::string(what) + " observed on " + act.host);
  }
  for (const auto& host : events.service_failures) {
    if (rng_.bernoulli(p.detect_host_action)) {
      emit(host, Severity::INFO, std::nullopt, "Legitimate request to " + host + " failed on a degraded service");
    }
  }

  for (const auto& finding : events.analyse_findings) {
    if (finding.level == Compromise::user) {
      emit(finding.host, Severity::USER, std::nullopt, "Analysis of " + finding.host + " found user-level compromise");
    } else if (finding.level == Compromise::admin) {
      emit(finding.host, Severity::ADMIN, std::nullopt,
           "Analysis of " + finding.host + " found admin-level compromise");
    }
  }

  for (const auto& activity : events.green_activity) {
    if (!state_.guardian_of_host(activity.host)) continue;
    if (rng_.bernoulli(p.fp_green)) {
      emit(activity.host, Severity::INFO, activity.source_zone,
           "Suspicious connection to " + activity.host + " from zone " + activity.source_zone);
    }
  }
  return alerts;
}

StepResult Engine::step(const ActionMap& actions) {
  if (finished()) throw RangeError("Engine::step: episode already finished");
  for (const auto& [actor, action] : actions) {
    const auto color = color_of_actor(action.actor.empty() ? actor : action.actor);
    if (!color || !verb_allowed_for(*color, action.verb)) {
      throw ContractViolation("action " + std::string(to_string(action.verb)) + " is not valid for " + actor);
    }
  }

  StepResult result;
  StepEvents& events = result.events;
  events.step = step_;
  events.phase = phase_at(step_, state_.phases);
  result.step = step_;
  result.phase = events.phase;

  // red
  AgentAction red = AgentAction::sleep(std::string(kRedAgentName));
  if (auto it = actions.find(std::string(kRedAgentName)); it != actions.end()) red = it->second;
  result.red_status = resolve_red_action(red, events);
  red_last_action_ = red;
  red_last_status_ = result.red_status;

  // green
  resolve_green(events);

  // blue
  for (int agent = 0; agent < kBlueAgents; ++agent) {
    const auto idx = static_cast<std::size_t>(agent);
    const auto name = blue_agent_name(agent);
    ActionStatus status;
    if (pending_[idx]) {
      auto& pending = *pending_[idx];
      last_action_[idx] = pending.action;
      if (--pending.remaining <= 0) {
        const AgentAction finished_action = pending.action;
        pending_[idx].reset();
        status = complete_blue_action(agent, finished_action, events);
      } else {
        status = ActionStatus::in_progress;
      }
    } else {
      AgentAction action = AgentAction::sleep(name);
      if (auto it = actions.find(name); it != actions.end()) action = it->second;
      status = resolve_blue_action(agent, action, events);
      last_action_[idx] = action;
    }
    last_status_[idx] = status;
    result.blue_status[idx] = status;
  }

  for (const auto& h : state_.hosts) {
    if (!h.available_at(step_)) events.hosts_down.push_back(h.id);
  }

  result.alerts = generate_alerts(events);
  result.reward = reward(events, config_.weights);

  for (auto& inbox : last_alerts_) inbox.clear();
  for (const auto& alert : result.alerts) last_alerts_[static_cast<std::size_t>(alert.observer)].push_back(alert);
  for (auto& inbox : last_alerts_) {
    std::stable_sort(inbox.begin(), inbox.end(), [](const Alert& a, const Alert& b) {
      return std::tie(a.step, a.host) < std::tie(b.step, b.host);
    });
  }

  ++step_;
  for (int agent = 0; agent < kBlueAgents; ++agent) {
    result.observations[static_cast<std::size_t>(agent)] = make_observation(agent, step_);
  }
  return result;
}

std::uint64_t Engine::state_hash() const {
  Fnv1a fnv;
  fnv.add(static_cast<std::int64_t>(state_.hash()));
  for (const auto& w : withdrawn_) fnv.add(w);
  for (const auto& pending : pending_) {
    if (pending) {
      fnv.add(pending->action.describe()).add(static_cast<std::int64_t>(pending->remaining));
    } else {
      fnv.add("-");
    }
  }
  return fnv.value();
}

}  // namespace acd
