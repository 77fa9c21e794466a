#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acd/actions.hpp"
#include "acd/comm.hpp"
#include "acd/net_model.hpp"
#include "acd/rng.hpp"

namespace acd {

/// Multi-step action lengths in steps. A duration <= 1 resolves in the step it
/// is submitted.
struct Durations {
  int analyse = 2;
  int deploy_decoy = 2;
  int restore = 5;
  /// Extra steps the host stays out of operation after Restore completes.
  int restore_downtime = 5;
};

struct Probabilities {
  double detect_scan = 0.5;
  double detect_scan_quiet = 0.1;
  double detect_exploit = 0.75;
  /// Host-level red actions (PrivilegeEscalate, DegradeService, Impact) and
  /// green requests failing on a degraded service raise an INFO alert with this chance.
  double detect_host_action = 0.75;
  double decoy_detection = 1.0;
  double fp_green = 0.02;
  double p_phish = 0.01;
  double exploit_success = 0.9;
  /// Chance a green picks AccessService over LocalWork in a step.
  double green_access = 0.5;
};

struct RewardWeights {
  double green = 1.0;
  double impact = 5.0;
  double impact_critical = 10.0;
  double restore = 1.0;
  double block = 1.0;
  /// Indexed by MissionPhase.
  std::array<double, 3> phase_multiplier{1.0, 2.0, 2.0};

  /// Throws ConfigError on any negative weight or multiplier.
  void validate() const;
};

struct EngineConfig {
  Durations durations;
  Probabilities probabilities;
  RewardWeights weights;
};

enum class Severity { INFO = 0, USER = 1, ADMIN = 2 };
std::string_view to_string(Severity severity);
std::optional<Severity> parse_severity(std::string_view text);

struct Alert {
  int step = 0;
  int observer = 0;
  std::string host;
  Severity severity = Severity::INFO;
  std::optional<std::string> source_zone;
  std::string description;
};

struct RewardRecord {
  int step = 0;
  int green_failures = 0;
  int impact_penalties = 0;
  /// Subset of impact_penalties that hit critical hosts (weighted separately).
  int critical_impacts = 0;
  int restore_downtime_penalties = 0;
  int block_denials = 0;
  double total = 0.0;
};

/// Everything that happened during one step, gathered for alerting and reward.
struct StepEvents {
  int step = 0;
  MissionPhase phase = MissionPhase::planning;

  struct Probe {
    Verb verb = Verb::Discover;
    std::string host;
    std::string source_zone;
    ScanMode mode = ScanMode::loud;
    bool decoy_hit = false;
    std::string service;
  };
  std::optional<Probe> red_probe;

  struct GreenActivity {
    std::string green;
    std::string host;
    std::string source_zone;
  };
  std::vector<GreenActivity> green_activity;

  struct Impact {
    std::string host;
    bool critical = false;
  };
  std::vector<Impact> impacts;
  /// Host-level red action (escalate, degrade, impact) that succeeded this step.
  struct HostAction {
    Verb verb = Verb::Impact;
    std::string host;
  };
  std::optional<HostAction> red_host_action;
  /// Hosts where a green request failed because the service was degraded.
  std::vector<std::string> service_failures;

  struct Finding {
    int agent = 0;
    std::string host;
    Compromise level = Compromise::clean;
  };
  std::vector<Finding> analyse_findings;

  int green_failures = 0;
  int block_denials = 0;
  std::vector<std::string> phishing_grants;
  std::vector<std::string> hosts_down;
};

struct GreenOutcome {
  /// Every failed green action this step (unavailable, degraded, or blocked).
  int failures = 0;
  int block_denials = 0;
  std::vector<std::string> phishing_grants;
};

/// What a blue agent sees at the start of a step.
struct BlueObservation {
  int agent = 0;
  std::string agent_name;
  int step = 0;
  MissionPhase phase = MissionPhase::planning;
  std::optional<AgentAction> last_action;
  ActionStatus last_status = ActionStatus::unknown;
  /// A multi-step action submitted earlier has not finished.
  bool busy = false;
  /// Alerts raised in the guarded zones during the previous step.
  std::vector<Alert> alerts;
  /// Peer vectors from the previous step, in peers_of(agent) order.
  std::vector<CommVector> comm_vectors;
  std::vector<std::string> zones;
  std::vector<std::string> hosts;
  /// Guardian index -> zones it guards, for mapping peer vectors to zones.
  std::map<int, std::vector<std::string>> peer_zones;
  /// Zones nobody guards; still valid Block/Allow endpoints.
  std::vector<std::string> unguarded_zones;
};

struct RedObservation {
  int step = 0;
  MissionPhase phase = MissionPhase::planning;
  std::optional<AgentAction> last_action;
  ActionStatus last_status = ActionStatus::unknown;
  /// Live sessions (compromised, not withdrawn, host available).
  std::map<std::string, Compromise> footholds;
  std::set<std::string> degraded;
  /// Alerts raised so far per host.
  std::map<std::string, int> exposure;
  /// Hosts (excluding footholds) in zones reachable from a foothold.
  std::vector<std::string> reachable;
  std::set<std::string> critical_hosts;
  std::set<std::string> green_serving_hosts;
};

struct StepResult {
  int step = 0;
  MissionPhase phase = MissionPhase::planning;
  std::array<ActionStatus, kBlueAgents> blue_status{};
  ActionStatus red_status = ActionStatus::unknown;
  std::vector<Alert> alerts;
  RewardRecord reward;
  StepEvents events;
  /// Observations for the next step (comm vectors filled in by the caller).
  std::array<BlueObservation, kBlueAgents> observations;
};

using ActionMap = std::map<std::string, AgentAction>;

RewardRecord reward(const StepEvents& events, const RewardWeights& weights);

/// Single-threaded per-episode engine. Resolution order per step is fixed:
/// red, green, blue, then alerts and reward.
class Engine {
 public:
  Engine(NetworkState initial, EngineConfig config, std::uint64_t seed);

  const NetworkState& state() const { return state_; }
  const EngineConfig& config() const { return config_; }
  int current_step() const { return step_; }
  bool finished() const { return step_ >= state_.phases.episode_length; }

  /// Observation before any action has been taken.
  BlueObservation initial_observation(int agent) const;
  RedObservation red_observation() const;

  /// Advances one step. Missing actions default to Sleep; an action whose verb
  /// does not belong to its actor's color throws ContractViolation.
  StepResult step(const ActionMap& actions);

  // Step phases, exposed for targeted tests. They operate on the current step.
  ActionStatus resolve_red_action(const AgentAction& action, StepEvents& events);
  GreenOutcome resolve_green(StepEvents& events);
  ActionStatus resolve_blue_action(int agent, const AgentAction& action, StepEvents& events);
  std::vector<Alert> generate_alerts(const StepEvents& events);

  bool agent_busy(int agent) const { return pending_[static_cast<std::size_t>(agent)].has_value(); }
  std::uint64_t state_hash() const;
  EngineRng& rng() { return rng_; }
  NetworkState& mutable_state() { return state_; }

 private:
  struct Pending {
    AgentAction action;
    int remaining = 0;
  };

  ConnectivityPolicy current_policy() const;
  std::optional<std::string> source_zone_for(const std::string& target_zone, const ConnectivityPolicy& policy) const;
  ActionStatus complete_blue_action(int agent, const AgentAction& action, StepEvents& events);
  bool guards_host(int agent, const std::string& host) const;
  void clear_red(Host& host);
  std::optional<std::string> free_decoy_slot(const Host& host) const;
  BlueObservation make_observation(int agent, int next_step) const;

  NetworkState state_;
  EngineConfig config_;
  EngineRng rng_;
  int step_ = 0;
  std::array<std::optional<Pending>, kBlueAgents> pending_;
  std::array<std::optional<AgentAction>, kBlueAgents> last_action_;
  std::array<ActionStatus, kBlueAgents> last_status_{};
  std::array<std::vector<Alert>, kBlueAgents> last_alerts_;
  std::optional<AgentAction> red_last_action_;
  ActionStatus red_last_status_ = ActionStatus::unknown;
  std::set<std::string> withdrawn_;
  std::map<std::string, int> exposure_;
};

}  // namespace acd
