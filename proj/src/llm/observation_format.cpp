#include "acd/llm/observation_format.hpp"

#include <algorithm>
#include <sstream>

#include "acd/comm.hpp"
#include "acd/errors.hpp"

namespace acd::llm {

namespace {

std::string one_line(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

/// Sender labels for the vectors of a "blue_agent_N" receiver; generic otherwise.
std::vector<std::string> sender_labels(const std::string& agent_name, std::size_t count) {
  std::vector<std::string> labels;
  int self = -1;
  if (agent_name.starts_with("blue_agent_")) {
    try {
      std::size_t used = 0;
      self = std::stoi(agent_name.substr(11), &used);
      if (used != agent_name.size() - 11) self = -1;
    } catch (const std::exception&) {
      self = -1;
    }
  }
  if (self >= 0 && self < kBlueAgents && count == kBlueAgents - 1) {
    for (int peer : peers_of(self)) labels.push_back(blue_agent_name(peer));
  } else {
    for (std::size_t i = 0; i < count; ++i) labels.push_back("sender_" + std::to_string(i));
  }
  return labels;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return lines;
}

}  // namespace

std::string describe_alert(const Alert& alert) {
  return "[step " + std::to_string(alert.step) + "] " + std::string(to_string(alert.severity)) + " on " + alert.host +
         ": " + one_line(alert.description);
}

FormattedObservation format_observation(const BlueObservation& obs) {
  FormattedObservation f;
  f.agent_name = obs.agent_name;
  f.mission_phase = std::string(to_string(obs.phase));
  f.last_action = obs.last_action ? obs.last_action->describe() : "None";
  f.last_action_status = std::string(to_string(obs.last_status));
  for (const auto& v : obs.comm_vectors) f.communication_vectors.push_back(to_string(v));
  if (f.communication_vectors.empty()) {
    for (int i = 0; i < kBlueAgents - 1; ++i) f.communication_vectors.push_back(to_string(CommVector{}));
  }
  auto alerts = obs.alerts;
  std::stable_sort(alerts.begin(), alerts.end(),
                   [](const Alert& a, const Alert& b) { return std::tie(a.step, a.host) < std::tie(b.step, b.host); });
  for (const auto& a : alerts) f.suspicious_activity.push_back(describe_alert(a));
  return f;
}

std::string render(const FormattedObservation& f) {
  std::ostringstream out;
  out << kFieldLabels[0] << ": " << one_line(f.agent_name) << '\n';
  out << kFieldLabels[1] << ": " << one_line(f.mission_phase) << '\n';
  out << kFieldLabels[2] << ": " << one_line(f.last_action) << '\n';
  out << kFieldLabels[3] << ": " << one_line(f.last_action_status) << '\n';
  out << kFieldLabels[4] << ":";
  if (f.communication_vectors.empty()) {
    out << " None\n";
  } else {
    out << '\n';
    const auto labels = sender_labels(f.agent_name, f.communication_vectors.size());
    for (std::size_t i = 0; i < f.communication_vectors.size(); ++i) {
      out << "- " << labels[i] << ": " << one_line(f.communication_vectors[i]) << '\n';
    }
  }
  out << kFieldLabels[5] << ":";
  if (f.suspicious_activity.empty()) {
    out << " None\n";
  } else {
    out << '\n';
    for (const auto& item : f.suspicious_activity) out << "- " << one_line(item) << '\n';
  }
  return out.str();
}

FormattedObservation parse_rendered(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;

  auto scalar = [&](const char* label) {
    const std::string prefix = std::string(label) + ": ";
    if (i >= lines.size() || !lines[i].starts_with(prefix)) {
      throw FormatError(std::string("expected field '") + label + "'");
    }
    return lines[i++].substr(prefix.size());
  };

  auto list = [&](const char* label, bool strip_sender) {
    std::vector<std::string> items;
    const std::string head = std::string(label) + ":";
    if (i >= lines.size() || !lines[i].starts_with(head)) {
      throw FormatError(std::string("expected field '") + label + "'");
    }
    const std::string rest = lines[i++].substr(head.size());
    if (rest == " None") return items;
    if (!rest.empty()) throw FormatError(std::string("unexpected inline value for '") + label + "'");
    while (i < lines.size() && lines[i].starts_with("- ")) {
      std::string item = lines[i++].substr(2);
      if (strip_sender) {
        auto colon = item.find(": ");
        if (colon == std::string::npos) throw FormatError("communication vector line without sender");
        item = item.substr(colon + 2);
      }
      items.push_back(std::move(item));
    }
    return items;
  };

  FormattedObservation f;
  f.agent_name = scalar(kFieldLabels[0]);
  f.mission_phase = scalar(kFieldLabels[1]);
  f.last_action = scalar(kFieldLabels[2]);
  f.last_action_status = scalar(kFieldLabels[3]);
  f.communication_vectors = list(kFieldLabels[4], true);
  f.suspicious_activity = list(kFieldLabels[5], false);
  return f;
}

}  // namespace acd::llm
