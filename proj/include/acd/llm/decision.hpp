#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "acd/blue_policy.hpp"

namespace acd::llm {

/// Targets an agent may name in a reply.
struct TargetCatalog {
  std::set<std::string> hosts;
  /// Zones the agent guards; one side of a Block/Allow pair must be among them.
  std::set<std::string> own_zones;
  std::set<std::string> all_zones;

  static TargetCatalog for_observation(const BlueObservation& observation);
};

struct LlmDecision {
  AgentAction action;
  std::string reason;
  std::string raw;
  bool valid = false;
  std::string error;
};

/// First balanced {...} in `text`, honouring JSON string quoting. Code fences
/// and surrounding prose are skipped over naturally.
std::optional<std::string> extract_first_json_object(std::string_view text);

/// Total: never throws. Any problem yields Sleep with valid=false and `error` set.
LlmDecision parse_decision(std::string_view reply, const TargetCatalog& catalog, const std::string& actor);

}  // namespace acd::llm
