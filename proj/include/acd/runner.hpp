#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "acd/config.hpp"
#include "acd/event_log.hpp"

namespace acd {

struct EpisodeMetrics {
  int episode = 0;
  double reward = 0.0;
  int green_failures = 0;
  int impacts = 0;
  int block_denials = 0;
  int restore_downtime = 0;
  int invalid_actions = 0;
  /// agent -> verb -> count
  std::map<std::string, std::map<std::string, int>> action_counts;
};

struct MetricsSummary {
  std::string name;
  int episodes = 0;
  int steps = 0;
  std::uint64_t seed = 0;
  std::string red_variant;
  std::vector<std::string> policies;
  std::vector<EpisodeMetrics> per_episode;
  double reward_mean = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single episode.
  double reward_std = 0.0;
  /// agent -> verb -> count over all episodes
  std::map<std::string, std::map<std::string, int>> action_counts;
  int invalid_actions = 0;
  /// policy kind -> mean seconds per decision
  std::map<std::string, double> mean_latency_by_kind;
  /// Mean seconds per decision over every queried decision in the run.
  double mean_decision_latency = 0.0;
  std::size_t decisions_timed = 0;

  nlohmann::json to_json() const;
  static MetricsSummary from_json(const nlohmann::json& j);
  static MetricsSummary load(const std::filesystem::path& path);
};

/// Welford mean and sample standard deviation.
std::pair<double, double> mean_and_std(const std::vector<double>& values);

struct RunOptions {
  /// Route llm-bound agents to config.llm.config.endpoint instead of the in-process mock.
  bool live_llm = false;
  bool write_files = true;
  std::shared_ptr<EventLog> log;
};

/// Runs every episode and writes trajectory.jsonl, metrics.csv, action_counts.csv,
/// summary.json and events.log into config.output_dir. LLM transport failures
/// never stop a run; they show up as invalid actions.
MetricsSummary run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Trajectory lines of one episode, as written to trajectory.jsonl.
std::vector<std::string> run_episode_lines(const ScenarioConfig& config, int episode, const RunOptions& options,
                                           EpisodeMetrics* metrics = nullptr);

struct CompareRow {
  std::string name;
  int episodes = 0;
  int steps = 0;
  double reward_mean = 0.0;
  double reward_std = 0.0;
  double mean_latency = 0.0;
  /// mean_latency divided by the first run's mean_latency.
  double latency_ratio = 0.0;
  int invalid_actions = 0;
};

struct Comparison {
  std::vector<CompareRow> rows;
  std::vector<std::string> warnings;

  std::string to_csv() const;
};

/// Throws ContractViolation on fewer than two summaries.
Comparison compare_runs(const std::vector<MetricsSummary>& summaries);

/// Horizontal bar chart, one bar per row.
std::string bar_chart_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& bars);

/// Writes comparison.csv plus reward.svg and latency.svg.
void write_comparison(const Comparison& comparison, const std::filesystem::path& out_dir);

}  // namespace acd
