#include "acd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "acd/errors.hpp"

namespace acd {

namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where.empty() ? key : where + "." + key, "wrong type");
  }
}

PolicyBinding parse_binding(const json& j, const std::string& where) {
  PolicyBinding b;
  if (j.is_string()) {
    auto kind = parse_policy_kind(j.get<std::string>());
    if (!kind) throw ConfigError(where, "unknown policy '" + j.get<std::string>() + "'");
    b.kind = *kind;
    return b;
  }
  expect_keys(j, where, {"policy", "injected_delay_ms", "endpoint", "timeout_ms", "info_threshold"});
  std::string policy = "sleep";
  read(j, "policy", policy, where);
  auto kind = parse_policy_kind(policy);
  if (!kind) throw ConfigError(where + ".policy", "unknown policy '" + policy + "'");
  b.kind = *kind;
  read(j, "injected_delay_ms", b.injected_delay_ms, where);
  read(j, "endpoint", b.endpoint, where);
  read(j, "timeout_ms", b.timeout_ms, where);
  read(j, "info_threshold", b.reactive.info_threshold, where);
  return b;
}

}  // namespace

TopologyConfig ScenarioConfig::topology() const {
  auto t = TopologyConfig::defaults(hosts_per_zone);
  t.phases.episode_length = steps;
  t.phases.mission_a_start = mission_a_start.value_or(static_cast<int>(std::lround(steps / 3.0)));
  t.phases.mission_b_start = mission_b_start.value_or(static_cast<int>(std::lround(2.0 * steps / 3.0)));
  return t;
}

void ScenarioConfig::validate() const {
  if (steps < 1) throw ConfigError("steps", "must be >= 1");
  if (episodes < 1) throw ConfigError("episodes", "must be >= 1");
  if (hosts_per_zone < 1) throw ConfigError("topology.hosts_per_zone", "must be >= 1");
  const auto t = topology();
  if (t.phases.mission_a_start < 0 || t.phases.mission_a_start > t.phases.mission_b_start ||
      t.phases.mission_b_start > steps) {
    throw ConfigError("topology.phase_boundaries", "need 0 <= mission_a <= mission_b <= steps");
  }
  if (red_params.stealth_interval < 1) throw ConfigError("red.stealth_interval", "must be >= 1");
  if (red_params.aggressive_rescan < 0.0 || red_params.aggressive_rescan > 1.0) {
    throw ConfigError("red.aggressive_rescan", "must be a probability");
  }
  for (std::size_t i = 0; i < blue.size(); ++i) {
    const auto where = "blue[" + std::to_string(i) + "]";
    if (blue[i].injected_delay_ms < 0) throw ConfigError(where + ".injected_delay_ms", "must be >= 0");
    if (blue[i].kind == PolicyKind::remote && blue[i].endpoint.empty()) {
      throw ConfigError(where + ".endpoint", "remote policy needs an endpoint");
    }
    if (blue[i].reactive.info_threshold < 1) throw ConfigError(where + ".info_threshold", "must be >= 1");
  }
  const auto& p = engine.probabilities;
  for (auto [name, value] : {std::pair{"detect_scan", p.detect_scan}, {"detect_scan_quiet", p.detect_scan_quiet},
                             {"detect_exploit", p.detect_exploit}, {"detect_host_action", p.detect_host_action}, {"decoy_detection", p.decoy_detection},
                             {"fp_green", p.fp_green}, {"p_phish", p.p_phish}, {"exploit_success", p.exploit_success},
                             {"green_access", p.green_access}}) {
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError(std::string("probabilities.") + name, "must be in [0, 1]");
  }
  const auto& d = engine.durations;
  if (d.analyse < 1 || d.deploy_decoy < 1 || d.restore < 1 || d.restore_downtime < 0) {
    throw ConfigError("durations", "action durations must be >= 1 and downtime >= 0");
  }
  engine.weights.validate();
  llm.config.validate();
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  expect_keys(j, "", {"name", "episodes", "steps", "seed", "topology", "red", "blue", "llm", "probabilities",
                      "durations", "rewards", "output_dir", "parallel_decisions", "parallel_episodes"});
  ScenarioConfig c;
  read(j, "name", c.name, "");
  read(j, "episodes", c.episodes, "");
  read(j, "steps", c.steps, "");
  read(j, "seed", c.seed, "");
  read(j, "parallel_decisions", c.parallel_decisions, "");
  read(j, "parallel_episodes", c.parallel_episodes, "");
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();

  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    expect_keys(t, "topology", {"hosts_per_zone", "phase_boundaries"});
    read(t, "hosts_per_zone", c.hosts_per_zone, "topology");
    if (t.contains("phase_boundaries")) {
      const auto& pb = t.at("phase_boundaries");
      if (!pb.is_array() || pb.size() != 2 || !pb[0].is_number_integer() || !pb[1].is_number_integer()) {
        throw ConfigError("topology.phase_boundaries", "expected [mission_a_start, mission_b_start]");
      }
      c.mission_a_start = pb[0].get<int>();
      c.mission_b_start = pb[1].get<int>();
    }
  }

  if (j.contains("red")) {
    const auto& r = j.at("red");
    if (r.is_string()) {
      auto v = parse_red_variant(r.get<std::string>());
      if (!v) throw ConfigError("red", "unknown variant '" + r.get<std::string>() + "'");
      c.red_variant = *v;
    } else {
      expect_keys(r, "red", {"variant", "stealth_interval", "aggressive_rescan", "withdraw_exposure"});
      std::string variant = "default";
      read(r, "variant", variant, "red");
      auto v = parse_red_variant(variant);
      if (!v) throw ConfigError("red.variant", "unknown variant '" + variant + "'");
      c.red_variant = *v;
      read(r, "stealth_interval", c.red_params.stealth_interval, "red");
      read(r, "aggressive_rescan", c.red_params.aggressive_rescan, "red");
      read(r, "withdraw_exposure", c.red_params.withdraw_exposure, "red");
    }
  }

  if (j.contains("blue")) {
    const auto& b = j.at("blue");
    if (b.is_array()) {
      if (b.size() != kBlueAgents) {
        throw ConfigError("blue", "expected exactly " + std::to_string(kBlueAgents) + " bindings, got " +
                                      std::to_string(b.size()));
      }
      for (std::size_t i = 0; i < b.size(); ++i) c.blue[i] = parse_binding(b[i], "blue[" + std::to_string(i) + "]");
    } else {
      // One binding applied to every blue agent.
      const auto binding = parse_binding(b, "blue");
      c.blue.fill(binding);
    }
  }

  if (j.contains("llm")) {
    const auto& l = j.at("llm");
    expect_keys(l, "llm", {"endpoint", "model", "temperature", "timeout_ms", "max_retries", "backoff_ms",
                           "token_budget", "api_key_env", "strategy", "prompt_dir", "mock"});
    auto& cfg = c.llm.config;
    read(l, "endpoint", cfg.endpoint, "llm");
    read(l, "model", cfg.model, "llm");
    read(l, "temperature", cfg.temperature, "llm");
    read(l, "max_retries", cfg.max_retries, "llm");
    read(l, "token_budget", cfg.token_budget, "llm");
    read(l, "api_key_env", cfg.api_key_env, "llm");
    int timeout_ms = static_cast<int>(cfg.timeout.count());
    int backoff_ms = static_cast<int>(cfg.backoff.count());
    read(l, "timeout_ms", timeout_ms, "llm");
    read(l, "backoff_ms", backoff_ms, "llm");
    cfg.timeout = std::chrono::milliseconds(timeout_ms);
    cfg.backoff = std::chrono::milliseconds(backoff_ms);
    if (l.contains("strategy")) {
      auto s = llm::parse_prompt_strategy(l.at("strategy").get<std::string>());
      if (!s) throw ConfigError("llm.strategy", "unknown prompt strategy");
      c.llm.strategy = *s;
    }
    if (l.contains("prompt_dir")) c.llm.prompt_dir = l.at("prompt_dir").get<std::string>();
    if (l.contains("mock")) c.llm.mock = llm::MockScript::from_json(l.at("mock"));
  }

  if (j.contains("probabilities")) {
    const auto& p = j.at("probabilities");
    expect_keys(p, "probabilities", {"detect_scan", "detect_scan_quiet", "detect_exploit", "detect_host_action", "decoy_detection",
                                     "fp_green", "p_phish", "exploit_success", "green_access"});
    auto& q = c.engine.probabilities;
    read(p, "detect_scan", q.detect_scan, "probabilities");
    read(p, "detect_scan_quiet", q.detect_scan_quiet, "probabilities");
    read(p, "detect_exploit", q.detect_exploit, "probabilities");
    read(p, "detect_host_action", q.detect_host_action, "probabilities");
    read(p, "decoy_detection", q.decoy_detection, "probabilities");
    read(p, "fp_green", q.fp_green, "probabilities");
    read(p, "p_phish", q.p_phish, "probabilities");
    read(p, "exploit_success", q.exploit_success, "probabilities");
    read(p, "green_access", q.green_access, "probabilities");
  }
  if (j.contains("durations")) {
    const auto& d = j.at("durations");
    expect_keys(d, "durations", {"analyse", "deploy_decoy", "restore", "restore_downtime"});
    read(d, "analyse", c.engine.durations.analyse, "durations");
    read(d, "deploy_decoy", c.engine.durations.deploy_decoy, "durations");
    read(d, "restore", c.engine.durations.restore, "durations");
    read(d, "restore_downtime", c.engine.durations.restore_downtime, "durations");
  }
  if (j.contains("rewards")) {
    const auto& r = j.at("rewards");
    expect_keys(r, "rewards", {"green", "impact", "impact_critical", "restore", "block", "phase_multipliers"});
    auto& w = c.engine.weights;
    read(r, "green", w.green, "rewards");
    read(r, "impact", w.impact, "rewards");
    read(r, "impact_critical", w.impact_critical, "rewards");
    read(r, "restore", w.restore, "rewards");
    read(r, "block", w.block, "rewards");
    if (r.contains("phase_multipliers")) {
      const auto& m = r.at("phase_multipliers");
      if (!m.is_array() || m.size() != 3) throw ConfigError("rewards.phase_multipliers", "expected 3 numbers");
      for (std::size_t i = 0; i < 3; ++i) w.phase_multiplier[i] = m[i].get<double>();
    }
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config", path.string() + " is not valid JSON");
  return from_json(j);
}

}  // namespace acd
