#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "acd/engine.hpp"

namespace acd::llm {

/// Natural-language observation handed to a language model. Rendered as six
/// labelled fields, always in this order.
struct FormattedObservation {
  std::string agent_name;
  std::string mission_phase;
  std::string last_action;
  std::string last_action_status;
  std::vector<std::string> communication_vectors;
  std::vector<std::string> suspicious_activity;

  bool operator==(const FormattedObservation&) const = default;
};

inline constexpr const char* kFieldLabels[] = {
    "Agent", "Mission Phase", "Last Action", "Last Action Status", "Communication Vectors",
    "Suspicious Activity Detected",
};

/// One line per alert, ordered by (step, host id).
std::string describe_alert(const Alert& alert);

FormattedObservation format_observation(const BlueObservation& observation);

/// Newlines inside values are replaced by spaces so every field stays parseable.
std::string render(const FormattedObservation& formatted);

/// Inverse of render. Throws FormatError when a field is missing or out of order.
FormattedObservation parse_rendered(std::string_view text);

}  // namespace acd::llm
