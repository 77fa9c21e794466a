#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "acd/net_model.hpp"

namespace acd {

enum class Color { blue, red, green };

enum class Verb {
  // blue
  Monitor,
  Analyse,
  DeployDecoy,
  Remove,
  Restore,
  BlockTrafficZone,
  AllowTrafficZone,
  Sleep,
  // red
  Discover,
  Exploit,
  PrivilegeEscalate,
  DegradeService,
  Impact,
  Withdraw,
  // green
  LocalWork,
  AccessService,
};

enum class ScanMode { loud, quiet };

enum class ActionStatus { success, failure, unknown, in_progress };

std::string_view to_string(Verb verb);
std::string_view to_string(ActionStatus status);
std::string_view to_string(ScanMode mode);
std::string_view to_string(Color color);

/// Exact-name lookup; `case_insensitive` also accepts e.g. "deploydecoy".
std::optional<Verb> parse_verb(std::string_view text, bool case_insensitive = false);
std::optional<ActionStatus> parse_status(std::string_view text);

Color color_of(Verb verb);
std::optional<Color> color_of_actor(std::string_view actor);

/// Sleep doubles as the red idle action.
bool verb_allowed_for(Color color, Verb verb);

const std::vector<Verb>& blue_verbs();
const std::vector<Verb>& red_verbs();

bool takes_host_target(Verb verb);
bool takes_zone_pair_target(Verb verb);

struct AgentAction {
  using Target = std::variant<std::monostate, std::string, ZonePair>;

  std::string actor;
  Verb verb = Verb::Sleep;
  Target target;
  ScanMode mode = ScanMode::loud;

  static AgentAction sleep(std::string actor) { return {std::move(actor), Verb::Sleep, {}, ScanMode::loud}; }
  static AgentAction on_host(std::string actor, Verb verb, std::string host) {
    return {std::move(actor), verb, std::move(host), ScanMode::loud};
  }
  static AgentAction on_zones(std::string actor, Verb verb, ZonePair pair) {
    return {std::move(actor), verb, std::move(pair), ScanMode::loud};
  }

  const std::string* host() const { return std::get_if<std::string>(&target); }
  const ZonePair* zones() const { return std::get_if<ZonePair>(&target); }

  /// "" / host id / "zone_a,zone_b".
  std::string target_text() const;
  /// "Verb target" as shown to language models and in logs.
  std::string describe() const;

  bool operator==(const AgentAction&) const = default;
};

/// Verb belongs to the actor's color and the target kind matches the verb.
bool is_well_formed(const AgentAction& action);

}  // namespace acd
