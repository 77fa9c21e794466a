#include "acd/llm/prompts.hpp"

#include <fstream>
#include <sstream>

#include "acd/errors.hpp"

namespace acd::llm {

namespace {

constexpr const char* kRequiredFiles[] = {"persona.txt",  "task.txt", "actions.txt", "response_format.txt",
                                          "examples.txt", "user.txt"};

std::string trim_trailing(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(PromptStrategy strategy) {
  switch (strategy) {
    case PromptStrategy::instruct: return "instruct";
    case PromptStrategy::fewshot_instruct: return "fewshot_instruct";
    case PromptStrategy::role_fewshot: return "role_fewshot";
  }
  return "?";
}

std::optional<PromptStrategy> parse_prompt_strategy(std::string_view text) {
  for (auto s : {PromptStrategy::instruct, PromptStrategy::fewshot_instruct, PromptStrategy::role_fewshot}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

PromptTemplates PromptTemplates::embedded() {
  PromptTemplates t;
  t.files_ = embedded_prompt_files();
  for (const char* name : kRequiredFiles) {
    if (!t.files_.contains(name)) throw ConfigError("prompts", std::string("embedded template missing: ") + name);
  }
  return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  if (!std::filesystem::is_directory(dir)) throw ConfigError("llm.prompt_dir", "not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::stringstream buf;
    buf << in.rdbuf();
    t.files_[entry.path().filename().string()] = buf.str();
  }
  for (const char* name : kRequiredFiles) {
    if (!t.files_.contains(name)) throw ConfigError("llm.prompt_dir", "missing template " + (dir / name).string());
  }
  return t;
}

const std::string& PromptTemplates::get(const std::string& name) const {
  auto it = files_.find(name);
  if (it == files_.end()) throw ConfigError("prompts", "no template named " + name);
  return it->second;
}

std::string fill(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string token = "{{" + key + "}}";
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
      text.replace(pos, token.size(), value);
      pos += value.size();
    }
  }
  return text;
}

std::string system_prompt(PromptStrategy strategy, const PromptTemplates& t) {
  std::string text = trim_trailing(t.get("task.txt")) + "\n\n" + trim_trailing(t.get("actions.txt")) + "\n\n" +
                     trim_trailing(t.get("response_format.txt"));
  if (strategy == PromptStrategy::instruct) return text;
  text += "\n\n" + trim_trailing(t.get("examples.txt"));
  if (strategy == PromptStrategy::fewshot_instruct) return text;
  return trim_trailing(t.get("persona.txt")) + "\n\n" + text;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

Messages build_messages(PromptStrategy strategy, const FormattedObservation& formatted, const PromptContext& context,
                        const PromptTemplates& templates, std::size_t token_budget) {
  Messages m;
  m.system = system_prompt(strategy, templates);

  std::vector<std::string> peers;
  for (const auto& [peer, zones] : context.peer_zones) {
    peers.push_back(blue_agent_name(peer) + " -> " + join(zones, ", "));
  }
  if (!context.unguarded_zones.empty()) peers.push_back("unguarded -> " + join(context.unguarded_zones, ", "));
  auto user_for = [&](const FormattedObservation& f) {
    return fill(trim_trailing(templates.get("user.txt")), {{"agent_name", f.agent_name},
                                                           {"observation", trim_trailing(render(f))},
                                                           {"hosts", join(context.hosts, ", ")},
                                                           {"zones", join(context.zones, ", ")},
                                                           {"peer_zones", join(peers, "; ")}});
  };

  FormattedObservation shown = formatted;
  m.user = user_for(shown);
  const auto original = formatted.suspicious_activity;
  while (token_budget > 0 && estimate_tokens(m.user) > token_budget && m.dropped_alerts < original.size()) {
    ++m.dropped_alerts;
    shown.suspicious_activity.assign(original.begin() + static_cast<std::ptrdiff_t>(m.dropped_alerts), original.end());
    shown.suspicious_activity.insert(shown.suspicious_activity.begin(),
                                     "(" + std::to_string(m.dropped_alerts) + " older events omitted)");
    m.user = user_for(shown);
  }
  return m;
}

}  // namespace acd::llm
