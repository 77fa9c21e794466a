#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "acd/actions.hpp"
#include "acd/comm.hpp"
#include "acd/engine.hpp"

namespace acd {

enum class PolicyKind { sleep, reactive, remote, llm };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view text);

/// One blue agent's choice for a step.
struct Decision {
  AgentAction action;
  std::string reason;
  /// False when the policy's output could not be used and Sleep was substituted.
  bool valid = true;
  std::string error;
  /// The user message was shortened to fit the token budget.
  bool truncated = false;
};

class BluePolicy {
 public:
  virtual ~BluePolicy() = default;
  virtual PolicyKind kind() const = 0;
  virtual Decision decide(const BlueObservation& observation) = 0;
};

/// No-defense baseline.
class SleepPolicy final : public BluePolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::sleep; }
  Decision decide(const BlueObservation& observation) override;
};

Decision sleep_policy(const BlueObservation& observation);

struct ReactiveParams {
  /// INFO alerts on one host before it gets analysed.
  int info_threshold = 2;
};

/// What the reactive ladder remembers between steps.
struct ReactiveMemory {
  std::map<std::string, int> info_counts;
  std::set<std::string> user_evidence;
  std::set<std::string> admin_evidence;
  /// Pairs this agent blocked, keyed by the peer that triggered the block.
  std::map<int, ZonePair> blocks;
};

/// Heuristic stand-in for a trained defender. Priority ladder:
///   1. ADMIN alert on h      -> Restore h
///   2. USER alert on h       -> Remove h
///   3. >= threshold INFO on h -> Analyse h
///   4. peer reports admin    -> BlockTrafficZone(own zone, peer zone)
///   5. peer recovered        -> AllowTrafficZone on the pair blocked for it
///   6. otherwise             -> Sleep
Decision reactive_policy(const BlueObservation& observation, ReactiveMemory& memory, const ReactiveParams& params = {});

class ReactivePolicy final : public BluePolicy {
 public:
  explicit ReactivePolicy(ReactiveParams params = {}) : params_(params) {}
  PolicyKind kind() const override { return PolicyKind::reactive; }
  Decision decide(const BlueObservation& observation) override {
    return reactive_policy(observation, memory_, params_);
  }
  const ReactiveMemory& memory() const { return memory_; }

 private:
  ReactiveParams params_;
  ReactiveMemory memory_;
};

/// Builds the vector an agent broadcasts after a step from its post-step
/// observation: detections are peers whose zones sourced this step's alerts,
/// level is the strongest evidence in its own zones, busy mirrors an
/// unfinished action.
CommReport comm_report_from_decision(const BlueObservation& post_step, const Decision& decision);

}  // namespace acd
