#include "acd/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "acd/errors.hpp"
#include "acd/llm/llm_policy.hpp"
#include "acd/llm/mock_chat.hpp"
#include "acd/remote_policy.hpp"

namespace acd {

namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class DelayedPolicy final : public BluePolicy {
 public:
  DelayedPolicy(std::unique_ptr<BluePolicy> inner, std::chrono::milliseconds delay)
      : inner_(std::move(inner)), delay_(delay) {}
  PolicyKind kind() const override { return inner_->kind(); }
  Decision decide(const BlueObservation& observation) override {
    std::this_thread::sleep_for(delay_);
    return inner_->decide(observation);
  }

 private:
  std::unique_ptr<BluePolicy> inner_;
  std::chrono::milliseconds delay_;
};

struct EpisodeRun {
  std::vector<std::string> trajectory;
  std::vector<std::string> metrics_rows;
  EpisodeMetrics metrics;
  std::map<std::string, std::pair<double, std::size_t>> latency;
};

std::unique_ptr<BluePolicy> make_policy(const ScenarioConfig& config, int agent, const RunOptions& options,
                                        const std::shared_ptr<llm::ChatClient>& chat,
                                        const llm::PromptTemplates& templates) {
  const auto& b = config.blue[static_cast<std::size_t>(agent)];
  std::unique_ptr<BluePolicy> p;
  switch (b.kind) {
    case PolicyKind::sleep:
      p = std::make_unique<SleepPolicy>();
      break;
    case PolicyKind::reactive:
      p = std::make_unique<ReactivePolicy>(b.reactive);
      break;
    case PolicyKind::remote:
      p = std::make_unique<RemotePolicy>(RemoteEndpoint::parse(b.endpoint), std::chrono::milliseconds(b.timeout_ms),
                                         options.log);
      break;
    case PolicyKind::llm:
      p = std::make_unique<llm::LlmPolicy>(chat, config.llm.config, config.llm.strategy, templates, options.log);
      break;
  }
  if (b.injected_delay_ms > 0) p = std::make_unique<DelayedPolicy>(std::move(p), std::chrono::milliseconds(b.injected_delay_ms));
  return p;
}

bool needs_threads(const ScenarioConfig& config) {
  if (!config.parallel_decisions) return false;
  for (const auto& b : config.blue) {
    if (b.kind == PolicyKind::llm || b.kind == PolicyKind::remote || b.injected_delay_ms > 0) return true;
  }
  return false;
}

ojson vectors_json(const std::vector<CommVector>& vectors) {
  ojson arr = ojson::array();
  for (const auto& v : vectors) arr.push_back(to_string(v));
  return arr;
}

EpisodeRun run_episode(const ScenarioConfig& config, int episode, const RunOptions& options) {
  EpisodeRun run;
  run.metrics.episode = episode;

  const auto episode_seed = derive_seed(config.seed, static_cast<std::uint64_t>(episode));
  Engine engine(build_topology(config.topology()), config.engine, derive_seed(episode_seed, 1));
  RedAgent red(config.red_variant, config.red_params, derive_seed(episode_seed, 2));

  std::shared_ptr<llm::ChatClient> chat;
  if (options.live_llm) {
    chat = std::make_shared<llm::HttpChatClient>(llm::HttpChatClient::from_config(config.llm.config));
  } else {
    chat = std::make_shared<llm::MockChatClient>(config.llm.mock);
  }
  const auto templates =
      config.llm.prompt_dir.empty() ? llm::PromptTemplates::embedded() : llm::PromptTemplates::load(config.llm.prompt_dir);

  std::array<std::unique_ptr<BluePolicy>, kBlueAgents> policies;
  for (int a = 0; a < kBlueAgents; ++a) policies[static_cast<std::size_t>(a)] = make_policy(config, a, options, chat, templates);
  const bool threaded = needs_threads(config);

  std::array<BlueObservation, kBlueAgents> obs;
  for (int a = 0; a < kBlueAgents; ++a) {
    auto& o = obs[static_cast<std::size_t>(a)];
    o = engine.initial_observation(a);
    o.comm_vectors.assign(kBlueAgents - 1, CommVector{});
  }

  double cumulative = 0.0;
  while (!engine.finished()) {
    const int step = engine.current_step();
    const auto red_action = red.act(engine.red_observation());
    const auto red_node = red.state().fsm_node;

    std::array<Decision, kBlueAgents> decisions;
    std::array<double, kBlueAgents> seconds{};
    std::array<bool, kBlueAgents> timed{};
    auto decide = [&](int a) {
      const auto i = static_cast<std::size_t>(a);
      if (obs[i].busy) {
        decisions[i].action = AgentAction::sleep(obs[i].agent_name);
        decisions[i].reason = "waiting for " + (obs[i].last_action ? obs[i].last_action->describe() : "action") +
                              " to finish";
        return;
      }
      const auto start = Clock::now();
      decisions[i] = policies[i]->decide(obs[i]);
      seconds[i] = std::chrono::duration<double>(Clock::now() - start).count();
      timed[i] = true;
      // A policy may only act for itself and only with blue verbs.
      if (decisions[i].action.actor != obs[i].agent_name || !verb_allowed_for(Color::blue, decisions[i].action.verb)) {
        decisions[i] = Decision{AgentAction::sleep(obs[i].agent_name), {}, false, "policy returned a foreign action", false};
      }
    };
    if (threaded) {
      std::vector<std::thread> workers;
      for (int a = 0; a < kBlueAgents; ++a) workers.emplace_back(decide, a);
      for (auto& w : workers) w.join();
    } else {
      for (int a = 0; a < kBlueAgents; ++a) decide(a);
    }

    ActionMap actions;
    actions[std::string(kRedAgentName)] = red_action;
    for (int a = 0; a < kBlueAgents; ++a) {
      const auto i = static_cast<std::size_t>(a);
      actions[obs[i].agent_name] = decisions[i].action;
      if (timed[i]) {
        auto& [sum, n] = run.latency[std::string(to_string(policies[i]->kind()))];
        sum += seconds[i];
        ++n;
      }
    }

    auto result = engine.step(actions);
    cumulative += result.reward.total;

    std::map<int, CommReport> reports;
    for (int a = 0; a < kBlueAgents; ++a) {
      reports[a] = comm_report_from_decision(result.observations[static_cast<std::size_t>(a)],
                                             decisions[static_cast<std::size_t>(a)]);
    }
    auto inbox = broadcast(reports);
    for (int a = 0; a < kBlueAgents; ++a) result.observations[static_cast<std::size_t>(a)].comm_vectors = inbox[a];

    const std::string phase(to_string(result.phase));
    {
      ojson line;
      line["episode"] = episode;
      line["step"] = step;
      line["phase"] = phase;
      line["agent"] = kRedAgentName;
      line["verb"] = to_string(red_action.verb);
      line["target"] = red_action.target_text();
      line["status"] = to_string(result.red_status);
      line["reason"] = std::string("fsm:") + std::string(to_string(red_node));
      line["valid"] = true;
      line["reward_total"] = result.reward.total;
      line["cumulative_reward"] = cumulative;
      run.trajectory.push_back(line.dump());
    }
    for (int a = 0; a < kBlueAgents; ++a) {
      const auto i = static_cast<std::size_t>(a);
      const auto& d = decisions[i];
      ojson line;
      line["episode"] = episode;
      line["step"] = step;
      line["phase"] = phase;
      line["agent"] = obs[i].agent_name;
      line["policy"] = to_string(policies[i]->kind());
      line["verb"] = to_string(d.action.verb);
      line["target"] = d.action.target_text();
      line["status"] = to_string(result.blue_status[i]);
      line["reason"] = d.reason;
      line["valid"] = d.valid;
      if (!d.valid) line["error"] = d.error;
      if (d.truncated) line["truncated"] = true;
      line["busy"] = obs[i].busy;
      line["reward_total"] = result.reward.total;
      line["cumulative_reward"] = cumulative;
      line["comm_vectors"] = vectors_json(obs[i].comm_vectors);
      line["comm_sent"] = to_string(encode(reports[a], a));
      run.trajectory.push_back(line.dump());

      ++run.metrics.action_counts[obs[i].agent_name][std::string(to_string(d.action.verb))];
      if (!d.valid) ++run.metrics.invalid_actions;
    }

    const auto& r = result.reward;
    run.metrics.reward += r.total;
    run.metrics.green_failures += r.green_failures;
    run.metrics.impacts += r.impact_penalties;
    run.metrics.block_denials += r.block_denials;
    run.metrics.restore_downtime += r.restore_downtime_penalties;
    std::ostringstream row;
    row << episode << ',' << step << ',' << phase << ',' << r.total << ',' << cumulative << ',' << r.green_failures
        << ',' << r.impact_penalties << ',' << r.critical_impacts << ',' << r.restore_downtime_penalties << ','
        << r.block_denials << ',' << result.alerts.size();
    run.metrics_rows.push_back(row.str());

    for (int a = 0; a < kBlueAgents; ++a) obs[static_cast<std::size_t>(a)] = std::move(result.observations[static_cast<std::size_t>(a)]);
  }
  return run;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double x : values) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  if (n < 2) return {mean, 0.0};
  return {mean, std::sqrt(std::max(0.0, m2 / static_cast<double>(n - 1)))};
}

std::vector<std::string> run_episode_lines(const ScenarioConfig& config, int episode, const RunOptions& options,
                                           EpisodeMetrics* metrics) {
  auto run = run_episode(config, episode, options);
  if (metrics) *metrics = run.metrics;
  return run.trajectory;
}

MetricsSummary run_scenario(const ScenarioConfig& config, const RunOptions& options_in) {
  config.validate();
  RunOptions options = options_in;
  if (!options.log) options.log = std::make_shared<EventLog>();

  std::vector<EpisodeRun> runs(static_cast<std::size_t>(config.episodes));
  if (config.parallel_episodes && config.episodes > 1) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(runs.size());
    for (int e = 0; e < config.episodes; ++e) {
      workers.emplace_back([&, e] {
        try {
          runs[static_cast<std::size_t>(e)] = run_episode(config, e, options);
        } catch (...) {
          errors[static_cast<std::size_t>(e)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  } else {
    for (int e = 0; e < config.episodes; ++e) runs[static_cast<std::size_t>(e)] = run_episode(config, e, options);
  }

  MetricsSummary s;
  s.name = config.name;
  s.episodes = config.episodes;
  s.steps = config.steps;
  s.seed = config.seed;
  s.red_variant = std::string(to_string(config.red_variant));
  for (const auto& b : config.blue) s.policies.emplace_back(to_string(b.kind));

  std::vector<double> rewards;
  std::map<std::string, std::pair<double, std::size_t>> latency;
  for (const auto& run : runs) {
    s.per_episode.push_back(run.metrics);
    rewards.push_back(run.metrics.reward);
    s.invalid_actions += run.metrics.invalid_actions;
    for (const auto& [agent, counts] : run.metrics.action_counts) {
      for (const auto& [verb, n] : counts) s.action_counts[agent][verb] += n;
    }
    for (const auto& [kind, sn] : run.latency) {
      latency[kind].first += sn.first;
      latency[kind].second += sn.second;
    }
  }
  std::tie(s.reward_mean, s.reward_std) = mean_and_std(rewards);
  double total = 0.0;
  for (const auto& [kind, sn] : latency) {
    if (sn.second > 0) s.mean_latency_by_kind[kind] = sn.first / static_cast<double>(sn.second);
    total += sn.first;
    s.decisions_timed += sn.second;
  }
  s.mean_decision_latency = s.decisions_timed ? total / static_cast<double>(s.decisions_timed) : 0.0;

  if (options.write_files) {
    std::filesystem::create_directories(config.output_dir);
    std::string trajectory;
    std::string metrics =
        "episode,step,phase,reward,cumulative_reward,green_failures,impacts,critical_impacts,restore_downtime,"
        "block_denials,alerts\n";
    std::string counts = "episode,agent,verb,count\n";
    for (const auto& run : runs) {
      for (const auto& line : run.trajectory) trajectory += line + '\n';
      for (const auto& row : run.metrics_rows) metrics += row + '\n';
      for (const auto& [agent, per_verb] : run.metrics.action_counts) {
        for (const auto& [verb, n] : per_verb) {
          counts += std::to_string(run.metrics.episode) + ',' + agent + ',' + verb + ',' + std::to_string(n) + '\n';
        }
      }
    }
    write_text(config.output_dir / "trajectory.jsonl", trajectory);
    write_text(config.output_dir / "metrics.csv", metrics);
    write_text(config.output_dir / "action_counts.csv", counts);
    write_text(config.output_dir / "summary.json", s.to_json().dump(2) + '\n');
    std::string events;
    for (const auto& line : options.log->lines()) events += line + '\n';
    write_text(config.output_dir / "events.log", events);
  }
  return s;
}

nlohmann::json MetricsSummary::to_json() const {
  ojson j;
  j["name"] = name;
  j["episodes"] = episodes;
  j["steps"] = steps;
  j["seed"] = seed;
  j["red_variant"] = red_variant;
  j["policies"] = policies;
  j["reward_mean"] = reward_mean;
  j["reward_std"] = reward_std;
  j["invalid_actions"] = invalid_actions;
  j["mean_decision_latency_s"] = mean_decision_latency;
  j["decisions_timed"] = decisions_timed;
  j["mean_latency_by_kind_s"] = mean_latency_by_kind;
  j["action_counts"] = action_counts;
  ojson eps = ojson::array();
  for (const auto& e : per_episode) {
    eps.push_back({{"episode", e.episode},
                   {"reward", e.reward},
                   {"green_failures", e.green_failures},
                   {"impacts", e.impacts},
                   {"block_denials", e.block_denials},
                   {"restore_downtime", e.restore_downtime},
                   {"invalid_actions", e.invalid_actions},
                   {"action_counts", e.action_counts}});
  }
  j["per_episode"] = eps;
  return nlohmann::json::parse(j.dump());
}

MetricsSummary MetricsSummary::from_json(const nlohmann::json& j) {
  MetricsSummary s;
  try {
    s.name = j.at("name").get<std::string>();
    s.episodes = j.at("episodes").get<int>();
    s.steps = j.at("steps").get<int>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.red_variant = j.value("red_variant", std::string());
    s.policies = j.value("policies", std::vector<std::string>{});
    s.reward_mean = j.at("reward_mean").get<double>();
    s.reward_std = j.at("reward_std").get<double>();
    s.invalid_actions = j.value("invalid_actions", 0);
    s.mean_decision_latency = j.at("mean_decision_latency_s").get<double>();
    s.decisions_timed = j.value("decisions_timed", std::size_t{0});
    s.mean_latency_by_kind = j.value("mean_latency_by_kind_s", std::map<std::string, double>{});
    s.action_counts = j.value("action_counts", decltype(s.action_counts){});
    for (const auto& e : j.value("per_episode", nlohmann::json::array())) {
      EpisodeMetrics m;
      m.episode = e.value("episode", 0);
      m.reward = e.value("reward", 0.0);
      m.green_failures = e.value("green_failures", 0);
      m.impacts = e.value("impacts", 0);
      m.block_denials = e.value("block_denials", 0);
      m.restore_downtime = e.value("restore_downtime", 0);
      m.invalid_actions = e.value("invalid_actions", 0);
      m.action_counts = e.value("action_counts", decltype(m.action_counts){});
      s.per_episode.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad summary: ") + e.what());
  }
  return s;
}

MetricsSummary MetricsSummary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError(path.string() + " is not valid JSON");
  return from_json(j);
}

}  // namespace acd
