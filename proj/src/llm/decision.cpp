#include "acd/llm/decision.hpp"

#include <json.hpp>

#include "acd/observation_json.hpp"

namespace acd::llm {

TargetCatalog TargetCatalog::for_observation(const BlueObservation& obs) {
  TargetCatalog c;
  c.hosts.insert(obs.hosts.begin(), obs.hosts.end());
  c.own_zones.insert(obs.zones.begin(), obs.zones.end());
  c.all_zones = c.own_zones;
  for (const auto& [peer, zones] : obs.peer_zones) c.all_zones.insert(zones.begin(), zones.end());
  c.all_zones.insert(obs.unguarded_zones.begin(), obs.unguarded_zones.end());
  return c;
}

std::optional<std::string> extract_first_json_object(std::string_view text) {
  for (std::size_t start = text.find('{'); start != std::string_view::npos; start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          std::string candidate(text.substr(start, i - start + 1));
          if (nlohmann::json::accept(candidate)) return candidate;
          break;
        }
      }
    }
  }
  return std::nullopt;
}

LlmDecision parse_decision(std::string_view reply, const TargetCatalog& catalog, const std::string& actor) {
  LlmDecision d;
  d.raw = std::string(reply);
  d.action = AgentAction::sleep(actor);
  auto fail = [&](std::string why) {
    d.action = AgentAction::sleep(actor);
    d.valid = false;
    d.error = std::move(why);
    return d;
  };

  const auto object = extract_first_json_object(reply);
  if (!object) return fail("no JSON object in reply");
  const auto j = nlohmann::json::parse(*object, nullptr, false);
  if (!j.is_object()) return fail("reply JSON is not an object");

  if (auto it = j.find("reason"); it != j.end() && it->is_string()) d.reason = it->get<std::string>();

  auto action_it = j.find("action");
  if (action_it == j.end() || !action_it->is_string()) return fail("missing 'action'");
  const auto verb = parse_verb(action_it->get<std::string>(), true);
  if (!verb) return fail("unknown action '" + action_it->get<std::string>() + "'");
  if (!verb_allowed_for(Color::blue, *verb)) return fail("action '" + std::string(to_string(*verb)) + "' is not a blue action");

  AgentAction action{actor, *verb, {}, ScanMode::loud};
  if (takes_host_target(*verb) || takes_zone_pair_target(*verb)) {
    auto target_it = j.find("target");
    if (target_it == j.end() || target_it->is_null()) return fail("missing 'target'");
    auto target = parse_action_target(*verb, *target_it);
    if (!target) return fail("malformed target");
    action.target = std::move(*target);
    if (const auto* host = action.host()) {
      if (!catalog.hosts.contains(*host)) return fail("unknown host '" + *host + "'");
    } else if (const auto* pair = action.zones()) {
      if (!catalog.all_zones.contains(pair->first) || !catalog.all_zones.contains(pair->second)) {
        return fail("unknown zone in '" + to_string(*pair) + "'");
      }
      if (!catalog.own_zones.contains(pair->first) && !catalog.own_zones.contains(pair->second)) {
        return fail("neither zone of '" + to_string(*pair) + "' is guarded by " + actor);
      }
    }
  }
  d.action = std::move(action);
  d.valid = true;
  return d;
}

}  // namespace acd::llm
