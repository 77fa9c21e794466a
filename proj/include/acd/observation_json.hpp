#pragma once

#include <optional>

#include <json.hpp>

#include "acd/actions.hpp"
#include "acd/engine.hpp"

namespace acd {

nlohmann::json to_json(const Alert& alert);
Alert alert_from_json(const nlohmann::json& j);

/// Structured observation as sent to remote policies.
nlohmann::json to_json(const BlueObservation& observation);

/// Target in the forms accepted from external policies: a host id string for
/// host verbs; for zone verbs either ["zone_a", "zone_b"] or one string joined
/// by ',', '|', "->" or whitespace. Returns nullopt when the shape is wrong.
std::optional<AgentAction::Target> parse_action_target(Verb verb, const nlohmann::json& target);

}  // namespace acd
