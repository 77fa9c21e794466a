#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "acd/engine.hpp"
#include "acd/llm/observation_format.hpp"

namespace acd::llm {

/// Each strategy's system prompt extends the previous one:
/// instruct = task + actions + response format; fewshot_instruct adds worked
/// examples; role_fewshot prefixes the expert persona.
enum class PromptStrategy { instruct, fewshot_instruct, role_fewshot };

std::string_view to_string(PromptStrategy strategy);
std::optional<PromptStrategy> parse_prompt_strategy(std::string_view text);

/// Template files compiled into the library from prompts/v1/.
const std::map<std::string, std::string>& embedded_prompt_files();

/// Plain-text prompt templates with {{name}} placeholders.
class PromptTemplates {
 public:
  static PromptTemplates embedded();
  /// Reads persona.txt, task.txt, actions.txt, response_format.txt,
  /// examples.txt and user.txt. Throws ConfigError if one is missing.
  static PromptTemplates load(const std::filesystem::path& dir);

  const std::string& get(const std::string& name) const;

 private:
  std::map<std::string, std::string> files_;
};

/// Replaces every {{key}} in `text`; unknown placeholders are left as-is.
std::string fill(std::string text, const std::map<std::string, std::string>& values);

std::string system_prompt(PromptStrategy strategy, const PromptTemplates& templates);

/// Rough token count (4 characters per token, rounded up).
std::size_t estimate_tokens(std::string_view text);

struct Messages {
  std::string system;
  std::string user;
  /// Oldest suspicious-activity lines dropped to fit the budget.
  std::size_t dropped_alerts = 0;
  bool truncated() const { return dropped_alerts > 0; }
};

struct PromptContext {
  std::vector<std::string> hosts;
  std::vector<std::string> zones;
  std::map<int, std::vector<std::string>> peer_zones;
  std::vector<std::string> unguarded_zones;
};

/// System prompt plus a user message embedding the rendered observation. When
/// the user message exceeds `token_budget` (0 = unlimited), suspicious-activity
/// lines are dropped oldest-first and replaced by a count of omitted events.
Messages build_messages(PromptStrategy strategy, const FormattedObservation& formatted, const PromptContext& context,
                        const PromptTemplates& templates, std::size_t token_budget = 0);

}  // namespace acd::llm
