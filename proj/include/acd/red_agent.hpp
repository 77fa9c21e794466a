#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "acd/actions.hpp"
#include "acd/engine.hpp"
#include "acd/rng.hpp"

namespace acd {

enum class RedVariant { default_fsm, aggressive, stealthy, impact, degrade };
enum class FsmNode { recon, exploit, escalate, act, withdraw };

std::string_view to_string(RedVariant variant);
std::string_view to_string(FsmNode node);
/// Accepts "default", "aggressive", "stealthy", "impact", "degrade".
std::optional<RedVariant> parse_red_variant(std::string_view text);

struct RedAgentParams {
  /// Stealthy variant acts on every k-th step only.
  int stealth_interval = 3;
  /// Aggressive variant re-scans a known host (footholds included) with this chance once nothing is left to discover.
  double aggressive_rescan = 0.5;
  /// Stealthy variant withdraws from a host once this many alerts were raised on it.
  int withdraw_exposure = 3;
};

struct DetectionProfile {
  ScanMode scan_mode = ScanMode::loud;
  /// Act every `interval`-th step.
  int interval = 1;

  double activity_rate() const { return 1.0 / static_cast<double>(interval); }
};

DetectionProfile detection_profile(RedVariant variant, const RedAgentParams& params = {});

struct RedState {
  std::map<std::string, Compromise> footholds;
  std::set<std::string> known_hosts;
  std::set<std::string> withdrawn;
  FsmNode fsm_node = FsmNode::recon;
  RedVariant variant = RedVariant::default_fsm;
};

/// Picks the next red action. Updates `state` from `visible` first (footholds,
/// discoveries confirmed by the last action status). Yields Sleep when red holds
/// no foothold.
AgentAction next_action(RedState& state, const RedObservation& visible, EngineRng& rng,
                        const RedAgentParams& params = {});

/// Per-episode red policy object owning its state and random stream.
class RedAgent {
 public:
  RedAgent(RedVariant variant, RedAgentParams params, std::uint64_t seed);

  AgentAction act(const RedObservation& visible) { return next_action(state_, visible, rng_, params_); }
  const RedState& state() const { return state_; }
  RedVariant variant() const { return state_.variant; }

 private:
  RedState state_;
  RedAgentParams params_;
  EngineRng rng_;
};

}  // namespace acd
