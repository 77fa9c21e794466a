#include "acd/observation_json.hpp"

#include <algorithm>
#include <cctype>

namespace acd {

nlohmann::json to_json(const Alert& alert) {
  nlohmann::json j{{"step", alert.step},
                   {"observer", alert.observer},
                   {"host", alert.host},
                   {"severity", std::string(to_string(alert.severity))},
                   {"description", alert.description}};
  j["source_zone"] = alert.source_zone ? nlohmann::json(*alert.source_zone) : nlohmann::json(nullptr);
  return j;
}

Alert alert_from_json(const nlohmann::json& j) {
  Alert a;
  a.step = j.at("step").get<int>();
  a.observer = j.at("observer").get<int>();
  a.host = j.at("host").get<std::string>();
  a.severity = parse_severity(j.at("severity").get<std::string>()).value_or(Severity::INFO);
  if (j.contains("source_zone") && j["source_zone"].is_string()) a.source_zone = j["source_zone"].get<std::string>();
  a.description = j.value("description", "");
  return a;
}

nlohmann::json to_json(const BlueObservation& obs) {
  nlohmann::json j;
  j["agent"] = obs.agent_name;
  j["agent_index"] = obs.agent;
  j["step"] = obs.step;
  j["mission_phase"] = std::string(to_string(obs.phase));
  if (obs.last_action) {
    j["last_action"] = {{"verb", std::string(to_string(obs.last_action->verb))},
                        {"target", obs.last_action->target_text()}};
  } else {
    j["last_action"] = nullptr;
  }
  j["last_action_status"] = std::string(to_string(obs.last_status));
  j["busy"] = obs.busy;
  j["alerts"] = nlohmann::json::array();
  for (const auto& a : obs.alerts) j["alerts"].push_back(to_json(a));
  j["comm_vectors"] = nlohmann::json::array();
  for (const auto& v : obs.comm_vectors) j["comm_vectors"].push_back(to_string(v));
  j["zones"] = obs.zones;
  j["hosts"] = obs.hosts;
  nlohmann::json peers = nlohmann::json::object();
  for (const auto& [peer, zones] : obs.peer_zones) peers[std::to_string(peer)] = zones;
  j["peer_zones"] = peers;
  j["unguarded_zones"] = obs.unguarded_zones;
  return j;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<ZonePair> split_pair(const std::string& text) {
  for (std::string_view sep : {"->", ",", "|"}) {
    auto pos = text.find(sep);
    if (pos != std::string::npos) {
      auto a = trim(std::string_view(text).substr(0, pos));
      auto b = trim(std::string_view(text).substr(pos + sep.size()));
      if (a.empty() || b.empty() || b.find_first_of(",|") != std::string::npos) return std::nullopt;
      return ZonePair{a, b};
    }
  }
  auto t = trim(text);
  auto ws = t.find_first_of(" \t");
  if (ws == std::string::npos) return std::nullopt;
  auto a = trim(std::string_view(t).substr(0, ws));
  auto b = trim(std::string_view(t).substr(ws));
  if (a.empty() || b.empty() || b.find_first_of(" \t") != std::string::npos) return std::nullopt;
  return ZonePair{a, b};
}

}  // namespace

std::optional<AgentAction::Target> parse_action_target(Verb verb, const nlohmann::json& target) {
  if (takes_zone_pair_target(verb)) {
    if (target.is_array() && target.size() == 2 && target[0].is_string() && target[1].is_string()) {
      return ZonePair{target[0].get<std::string>(), target[1].get<std::string>()};
    }
    if (target.is_string()) {
      if (auto pair = split_pair(target.get<std::string>())) return *pair;
    }
    return std::nullopt;
  }
  if (takes_host_target(verb)) {
    if (!target.is_string()) return std::nullopt;
    auto host = trim(target.get<std::string>());
    if (host.empty()) return std::nullopt;
    return host;
  }
  // Untargeted verbs ignore whatever target was supplied.
  return AgentAction::Target{};
}

}  // namespace acd
