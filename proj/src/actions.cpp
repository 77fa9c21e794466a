#include "acd/actions.hpp"

#include <algorithm>
#include <cctype>

namespace acd {

namespace {

constexpr Verb kAllVerbs[] = {Verb::Monitor,   Verb::Analyse,          Verb::DeployDecoy,    Verb::Remove,
                              Verb::Restore,   Verb::BlockTrafficZone, Verb::AllowTrafficZone, Verb::Sleep,
                              Verb::Discover,  Verb::Exploit,          Verb::PrivilegeEscalate, Verb::DegradeService,
                              Verb::Impact,    Verb::Withdraw,         Verb::LocalWork,      Verb::AccessService};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(Verb verb) {
  switch (verb) {
    case Verb::Monitor: return "Monitor";
    case Verb::Analyse: return "Analyse";
    case Verb::DeployDecoy: return "DeployDecoy";
    case Verb::Remove: return "Remove";
    case Verb::Restore: return "Restore";
    case Verb::BlockTrafficZone: return "BlockTrafficZone";
    case Verb::AllowTrafficZone: return "AllowTrafficZone";
    case Verb::Sleep: return "Sleep";
    case Verb::Discover: return "Discover";
    case Verb::Exploit: return "Exploit";
    case Verb::PrivilegeEscalate: return "PrivilegeEscalate";
    case Verb::DegradeService: return "DegradeService";
    case Verb::Impact: return "Impact";
    case Verb::Withdraw: return "Withdraw";
    case Verb::LocalWork: return "LocalWork";
    case Verb::AccessService: return "AccessService";
  }
  return "?";
}

std::string_view to_string(ActionStatus status) {
  switch (status) {
    case ActionStatus::success: return "TRUE";
    case ActionStatus::failure: return "FALSE";
    case ActionStatus::unknown: return "UNKNOWN";
    case ActionStatus::in_progress: return "IN_PROGRESS";
  }
  return "?";
}

std::string_view to_string(ScanMode mode) { return mode == ScanMode::loud ? "loud" : "quiet"; }

std::string_view to_string(Color color) {
  switch (color) {
    case Color::blue: return "blue";
    case Color::red: return "red";
    case Color::green: return "green";
  }
  return "?";
}

std::optional<Verb> parse_verb(std::string_view text, bool case_insensitive) {
  for (Verb v : kAllVerbs) {
    if (case_insensitive ? iequals(to_string(v), text) : to_string(v) == text) return v;
  }
  return std::nullopt;
}

std::optional<ActionStatus> parse_status(std::string_view text) {
  for (auto s : {ActionStatus::success, ActionStatus::failure, ActionStatus::unknown, ActionStatus::in_progress}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

Color color_of(Verb verb) {
  switch (verb) {
    case Verb::Discover:
    case Verb::Exploit:
    case Verb::PrivilegeEscalate:
    case Verb::DegradeService:
    case Verb::Impact:
    case Verb::Withdraw:
      return Color::red;
    case Verb::LocalWork:
    case Verb::AccessService:
      return Color::green;
    default:
      return Color::blue;
  }
}

std::optional<Color> color_of_actor(std::string_view actor) {
  if (actor.starts_with("blue_agent_")) return Color::blue;
  if (actor.starts_with("red_agent_")) return Color::red;
  if (actor.starts_with("green_")) return Color::green;
  return std::nullopt;
}

bool verb_allowed_for(Color color, Verb verb) {
  if (verb == Verb::Sleep) return color != Color::green;
  return color_of(verb) == color;
}

const std::vector<Verb>& blue_verbs() {
  static const std::vector<Verb> verbs{Verb::Monitor, Verb::Analyse,          Verb::DeployDecoy,      Verb::Remove,
                                       Verb::Restore, Verb::BlockTrafficZone, Verb::AllowTrafficZone, Verb::Sleep};
  return verbs;
}

const std::vector<Verb>& red_verbs() {
  static const std::vector<Verb> verbs{Verb::Discover,       Verb::Exploit, Verb::PrivilegeEscalate,
                                       Verb::DegradeService, Verb::Impact,  Verb::Withdraw};
  return verbs;
}

bool takes_host_target(Verb verb) {
  switch (verb) {
    case Verb::Analyse:
    case Verb::DeployDecoy:
    case Verb::Remove:
    case Verb::Restore:
    case Verb::Discover:
    case Verb::Exploit:
    case Verb::PrivilegeEscalate:
    case Verb::DegradeService:
    case Verb::Impact:
    case Verb::Withdraw:
    case Verb::AccessService:
      return true;
    default:
      return false;
  }
}

bool takes_zone_pair_target(Verb verb) { return verb == Verb::BlockTrafficZone || verb == Verb::AllowTrafficZone; }

std::string AgentAction::target_text() const {
  if (const auto* h = host()) return *h;
  if (const auto* z = zones()) return to_string(*z);
  return {};
}

std::string AgentAction::describe() const {
  std::string out(to_string(verb));
  const auto t = target_text();
  if (!t.empty()) out += " " + t;
  return out;
}

bool is_well_formed(const AgentAction& action) {
  const auto color = color_of_actor(action.actor);
  if (!color || !verb_allowed_for(*color, action.verb)) return false;
  if (takes_host_target(action.verb)) return action.host() != nullptr;
  if (takes_zone_pair_target(action.verb)) return action.zones() != nullptr;
  return std::holds_alternative<std::monostate>(action.target);
}

}  // namespace acd
