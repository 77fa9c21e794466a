#include <gtest/gtest.h>

#include <cmath>

#include "acd/engine.hpp"
#include "acd/errors.hpp"
#include "acd/red_agent.hpp"

using namespace acd;

namespace {

const std::string kOfficeHost0 = host_id(NetworkId::headquarters, ZoneKind::office, 0);
const std::string kOfficeHost1 = host_id(NetworkId::headquarters, ZoneKind::office, 1);
const std::string kRestrictedAHost0 = host_id(NetworkId::deployed_a, ZoneKind::restricted, 0);
const std::string kOperationalAHost0 = host_id(NetworkId::deployed_a, ZoneKind::operational, 0);
const std::string kContractorZone = zone_id(NetworkId::contractor, ZoneKind::contractor);
const std::string kRestrictedAZone = zone_id(NetworkId::deployed_a, ZoneKind::restricted);
const std::string kOfficeZone = zone_id(NetworkId::headquarters, ZoneKind::office);

/// No phishing, no false positives, no green traffic.
EngineConfig quiet() {
  EngineConfig c;
  c.probabilities.p_phish = 0.0;
  c.probabilities.fp_green = 0.0;
  c.probabilities.green_access = 0.0;
  return c;
}

Engine make_engine(EngineConfig c = quiet(), std::uint64_t seed = 1) {
  return Engine(build_topology(TopologyConfig::defaults()), c, seed);
}

ActionMap only(AgentAction action) {
  ActionMap m;
  m[action.actor] = std::move(action);
  return m;
}

AgentAction on_host(int agent, Verb verb, const std::string& host) {
  return AgentAction::on_host(blue_agent_name(agent), verb, host);
}

AgentAction red(Verb verb, const std::string& host) { return AgentAction::on_host(std::string(kRedAgentName), verb, host); }

bool has_alert(const std::vector<Alert>& alerts, const std::string& host, Severity sev) {
  for (const auto& a : alerts) {
    if (a.host == host && a.severity == sev) return true;
  }
  return false;
}

}  // namespace

TEST(Engine, MissingActionsDefaultToSleep) {
  auto e = make_engine();
  auto r = e.step({});
  for (auto s : r.blue_status) EXPECT_EQ(s, ActionStatus::success);
  EXPECT_EQ(r.red_status, ActionStatus::success);
  EXPECT_EQ(e.current_step(), 1);
  ASSERT_TRUE(r.observations[0].last_action.has_value());
  EXPECT_EQ(r.observations[0].last_action->verb, Verb::Sleep);
}

TEST(Engine, ForeignColorVerbIsRejected) {
  auto e = make_engine();
  EXPECT_THROW(e.step(only(on_host(0, Verb::Impact, kRestrictedAHost0))), ContractViolation);
  ActionMap m;
  m[std::string(kRedAgentName)] = AgentAction::on_host(std::string(kRedAgentName), Verb::Restore, kOfficeHost0);
  EXPECT_THROW(e.step(m), ContractViolation);
  EXPECT_EQ(e.current_step(), 0);
}

TEST(Engine, AnalyseTakesTwoStepsAndReportsLevel) {
  auto e = make_engine();
  e.mutable_state().find_host(kOfficeHost0)->compromise = Compromise::user;
  auto r0 = e.step(only(on_host(4, Verb::Analyse, kOfficeHost0)));
  EXPECT_EQ(r0.blue_status[4], ActionStatus::in_progress);
  EXPECT_TRUE(r0.observations[4].busy);
  EXPECT_TRUE(e.agent_busy(4));

  auto r1 = e.step({});
  EXPECT_EQ(r1.blue_status[4], ActionStatus::success);
  EXPECT_FALSE(e.agent_busy(4));
  EXPECT_TRUE(has_alert(r1.observations[4].alerts, kOfficeHost0, Severity::USER));
  for (const auto& a : r1.observations[4].alerts) EXPECT_EQ(a.observer, 4);
  EXPECT_TRUE(r1.observations[0].alerts.empty());
}

TEST(Engine, AnalyseOfAdminHostRaisesAdminAlert) {
  auto e = make_engine();
  e.mutable_state().find_host(kOfficeHost1)->compromise = Compromise::admin;
  e.step(only(on_host(4, Verb::Analyse, kOfficeHost1)));
  auto r = e.step({});
  EXPECT_TRUE(has_alert(r.alerts, kOfficeHost1, Severity::ADMIN));
}

TEST(Engine, BlueCannotActOutsideItsZones) {
  auto e = make_engine();
  auto r = e.step(only(on_host(0, Verb::Analyse, kOfficeHost0)));
  EXPECT_EQ(r.blue_status[0], ActionStatus::failure);
  EXPECT_FALSE(e.agent_busy(0));
}

TEST(Engine, RemoveClearsUserButNotAdmin) {
  auto e = make_engine();
  e.mutable_state().find_host(kOfficeHost0)->compromise = Compromise::user;
  auto r = e.step(only(on_host(4, Verb::Remove, kOfficeHost0)));
  EXPECT_EQ(r.blue_status[4], ActionStatus::success);
  EXPECT_EQ(e.state().find_host(kOfficeHost0)->compromise, Compromise::clean);

  e.mutable_state().find_host(kOfficeHost1)->compromise = Compromise::admin;
  r = e.step(only(on_host(4, Verb::Remove, kOfficeHost1)));
  EXPECT_EQ(r.blue_status[4], ActionStatus::failure);
  EXPECT_EQ(e.state().find_host(kOfficeHost1)->compromise, Compromise::admin);
}

TEST(Engine, RestoreDurationAndDowntime) {
  auto cfg = quiet();
  auto e = make_engine(cfg);
  e.mutable_state().find_host(kOfficeHost0)->compromise = Compromise::admin;
  const int busy_steps = cfg.durations.restore;
  const int down_steps = cfg.durations.restore + cfg.durations.restore_downtime;

  auto r = e.step(only(on_host(4, Verb::Restore, kOfficeHost0)));
  EXPECT_EQ(r.blue_status[4], ActionStatus::in_progress);
  EXPECT_EQ(e.state().find_host(kOfficeHost0)->compromise, Compromise::clean);
  EXPECT_EQ(r.reward.restore_downtime_penalties, 1);
  for (int s = 1; s < busy_steps; ++s) {
    r = e.step({});
    EXPECT_EQ(r.blue_status[4], s == busy_steps - 1 ? ActionStatus::success : ActionStatus::in_progress) << s;
  }
  for (int s = busy_steps; s < down_steps; ++s) {
    r = e.step({});
    EXPECT_EQ(r.reward.restore_downtime_penalties, 1) << s;
  }
  r = e.step({});
  EXPECT_EQ(r.reward.restore_downtime_penalties, 0);
  EXPECT_TRUE(e.state().find_host(kOfficeHost0)->available_at(e.current_step()));
}

TEST(Engine, DecoyCatchesExploit) {
  auto e = make_engine();
  e.step(only(on_host(0, Verb::DeployDecoy, kRestrictedAHost0)));
  auto r = e.step({});
  EXPECT_EQ(r.blue_status[0], ActionStatus::success);
  auto* h = e.mutable_state().find_host(kRestrictedAHost0);
  ASSERT_EQ(h->decoys.size(), 1u);
  h->services.clear();

  ActionMap m;
  m[std::string(kRedAgentName)] = red(Verb::Exploit, kRestrictedAHost0);
  r = e.step(m);
  EXPECT_EQ(r.red_status, ActionStatus::failure);
  EXPECT_EQ(e.state().find_host(kRestrictedAHost0)->compromise, Compromise::clean);
  ASSERT_TRUE(has_alert(r.alerts, kRestrictedAHost0, Severity::INFO));
  EXPECT_EQ(r.alerts.front().source_zone, kContractorZone);
}

TEST(Engine, BlockAndAllowTraffic) {
  auto e = make_engine();
  const ZonePair pair{kRestrictedAZone, kContractorZone};
  auto r = e.step(only(AgentAction::on_zones(blue_agent_name(0), Verb::BlockTrafficZone, pair)));
  EXPECT_EQ(r.blue_status[0], ActionStatus::success);
  EXPECT_TRUE(e.state().blocked.contains(pair));

  ActionMap m;
  m[std::string(kRedAgentName)] = red(Verb::Discover, kRestrictedAHost0);
  r = e.step(m);
  EXPECT_EQ(r.red_status, ActionStatus::failure);

  // Neither zone belongs to agent 0.
  r = e.step(only(AgentAction::on_zones(blue_agent_name(0), Verb::BlockTrafficZone,
                                           ZonePair{kOfficeZone, kContractorZone})));
  EXPECT_EQ(r.blue_status[0], ActionStatus::failure);

  r = e.step(only(AgentAction::on_zones(blue_agent_name(0), Verb::AllowTrafficZone, pair)));
  EXPECT_EQ(r.blue_status[0], ActionStatus::success);
  EXPECT_FALSE(e.state().blocked.contains(pair));
  r = e.step(m);
  EXPECT_EQ(r.red_status, ActionStatus::success);
}

TEST(Engine, BlockedGreenTrafficIsPenalised) {
  auto cfg = quiet();
  cfg.probabilities.green_access = 1.0;
  auto e = make_engine(cfg, 5);
  const auto& zones = e.state().zones;
  // Agent 4 cuts every HQ zone off from every other zone.
  for (const auto& own : e.state().zones_of(4)) {
    for (const auto& z : zones) {
      if (z.guardian != 4) e.mutable_state().blocked.insert(ZonePair{own, z.id});
    }
  }
  int denials = 0;
  for (int s = 0; s < 20; ++s) denials += e.step({}).reward.block_denials;
  EXPECT_GT(denials, 0);
}

TEST(Engine, ScanAlertGoesToGuardianWithSource) {
  auto cfg = quiet();
  cfg.probabilities.detect_scan = 1.0;
  auto e = make_engine(cfg);
  ActionMap m;
  m[std::string(kRedAgentName)] = red(Verb::Discover, kRestrictedAHost0);
  auto r = e.step(m);
  ASSERT_EQ(r.alerts.size(), 1u);
  EXPECT_EQ(r.alerts[0].observer, 0);
  EXPECT_EQ(r.alerts[0].source_zone, kContractorZone);
  EXPECT_EQ(r.observations[0].alerts.size(), 1u);
  EXPECT_EQ(e.red_observation().exposure.at(kRestrictedAHost0), 1);
}

TEST(Engine, QuietScanNeverSeenAtZeroChance) {
  auto cfg = quiet();
  cfg.probabilities.detect_scan_quiet = 0.0;
  auto e = make_engine(cfg);
  for (int s = 0; s < 10; ++s) {
    ActionMap m;
    auto a = red(Verb::Discover, kRestrictedAHost0);
    a.mode = ScanMode::quiet;
    m[std::string(kRedAgentName)] = a;
    EXPECT_TRUE(e.step(m).alerts.empty());
  }
}

TEST(Engine, HostLevelRedActionsAreVisible) {
  auto cfg = quiet();
  cfg.probabilities.detect_host_action = 1.0;
  auto e = make_engine(cfg);
  e.mutable_state().find_host(kRestrictedAHost0)->compromise = Compromise::user;
  ActionMap m;
  m[std::string(kRedAgentName)] = red(Verb::DegradeService, kRestrictedAHost0);
  auto r = e.step(m);
  EXPECT_EQ(r.red_status, ActionStatus::success);
  EXPECT_TRUE(e.state().find_host(kRestrictedAHost0)->degraded);
  EXPECT_TRUE(has_alert(r.alerts, kRestrictedAHost0, Severity::INFO));

  m[std::string(kRedAgentName)] = red(Verb::PrivilegeEscalate, kRestrictedAHost0);
  r = e.step(m);
  EXPECT_EQ(e.state().find_host(kRestrictedAHost0)->compromise, Compromise::admin);
  EXPECT_TRUE(has_alert(r.alerts, kRestrictedAHost0, Severity::INFO));
}

TEST(Engine, ImpactOnCriticalHost) {
  auto e = make_engine();
  e.mutable_state().find_host(kOperationalAHost0)->compromise = Compromise::admin;
  ActionMap m;
  m[std::string(kRedAgentName)] = red(Verb::Impact, kOperationalAHost0);
  auto r = e.step(m);
  EXPECT_EQ(r.red_status, ActionStatus::success);
  EXPECT_EQ(r.reward.impact_penalties, 1);
  EXPECT_EQ(r.reward.critical_impacts, 1);
  EXPECT_DOUBLE_EQ(r.reward.total, -10.0);
}

TEST(Engine, ImpactNeedsAdmin) {
  auto e = make_engine();
  e.mutable_state().find_host(kOperationalAHost0)->compromise = Compromise::user;
  ActionMap m;
  m[std::string(kRedAgentName)] = red(Verb::Impact, kOperationalAHost0);
  EXPECT_EQ(e.step(m).red_status, ActionStatus::failure);
}

TEST(Engine, WithdrawnHostStopsBeingAFoothold) {
  auto e = make_engine();
  const auto contractor = host_id(NetworkId::contractor, ZoneKind::contractor, 0);
  ASSERT_TRUE(e.red_observation().footholds.contains(contractor));
  ActionMap m;
  m[std::string(kRedAgentName)] = red(Verb::Withdraw, contractor);
  EXPECT_EQ(e.step(m).red_status, ActionStatus::success);
  EXPECT_FALSE(e.red_observation().footholds.contains(contractor));
  EXPECT_TRUE(e.red_observation().reachable.empty());
}

TEST(Engine, PhishingGrantsUserAccess) {
  auto cfg = quiet();
  cfg.probabilities.p_phish = 1.0;
  auto e = make_engine(cfg);
  auto r = e.step({});
  EXPECT_FALSE(r.events.phishing_grants.empty());
  for (const auto& h : r.events.phishing_grants) EXPECT_EQ(e.state().find_host(h)->compromise, Compromise::user);
}

TEST(Engine, NoPhishingAtZeroChance) {
  auto e = make_engine();
  for (int s = 0; s < 50; ++s) EXPECT_TRUE(e.step({}).events.phishing_grants.empty());
}

TEST(Engine, EpisodeEnds) {
  auto topo = TopologyConfig::defaults();
  topo.phases = {6, 2, 4};
  Engine e(build_topology(topo), quiet(), 3);
  for (int s = 0; s < 6; ++s) e.step({});
  EXPECT_TRUE(e.finished());
  EXPECT_THROW(e.step({}), RangeError);
}

TEST(Reward, WeightedSumTimesPhaseMultiplier) {
  RewardWeights w;
  StepEvents ev;
  ev.phase = MissionPhase::mission_a;
  ev.green_failures = 3;
  ev.block_denials = 2;
  ev.impacts = {{"x", false}, {"y", true}};
  ev.hosts_down = {"z"};
  const auto r = reward(ev, w);
  // 3 green + 5 plain impact + 10 critical impact + 1 down + 2 denied, doubled in a mission phase
  EXPECT_DOUBLE_EQ(r.total, -2.0 * (3 + 5 + 10 + 1 + 2));
  EXPECT_EQ(r.impact_penalties, 2);
  EXPECT_EQ(r.critical_impacts, 1);
}

TEST(Reward, CriticalImpactInPlanning) {
  StepEvents ev;
  ev.impacts = {{"crit", true}};
  EXPECT_DOUBLE_EQ(reward(ev, RewardWeights{}).total, -10.0);
}

TEST(Reward, QuietStepIsPositiveZero) {
  const auto r = reward(StepEvents{}, RewardWeights{});
  EXPECT_EQ(r.total, 0.0);
  EXPECT_FALSE(std::signbit(r.total));
}

TEST(Reward, NegativeWeightRejected) {
  RewardWeights w;
  w.green = -1.0;
  try {
    reward(StepEvents{}, w);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "rewards.green");
  }
}

TEST(Engine, SameSeedSameTrajectory) {
  auto run = [](std::uint64_t seed) {
    EngineConfig cfg;
    Engine e(build_topology(TopologyConfig::defaults()), cfg, seed);
    RedAgent r(RedVariant::default_fsm, {}, seed + 1);
    std::vector<std::uint64_t> hashes;
    while (!e.finished() && e.current_step() < 200) {
      ActionMap m;
      m[std::string(kRedAgentName)] = r.act(e.red_observation());
      e.step(m);
      hashes.push_back(e.state_hash());
    }
    return hashes;
  };
  EXPECT_EQ(run(11), run(11));
  EXPECT_NE(run(11), run(12));
}

TEST(Engine, SleepingBlueNeverLowersCompromise) {
  Engine e(build_topology(TopologyConfig::defaults()), EngineConfig{}, 21);
  RedAgent r(RedVariant::aggressive, {}, 22);
  std::map<std::string, Compromise> last;
  for (const auto& h : e.state().hosts) last[h.id] = h.compromise;
  for (int s = 0; s < 300; ++s) {
    ActionMap m;
    m[std::string(kRedAgentName)] = r.act(e.red_observation());
    e.step(m);
    for (const auto& h : e.state().hosts) {
      EXPECT_GE(static_cast<int>(h.compromise), static_cast<int>(last[h.id])) << h.id << " step " << s;
      last[h.id] = h.compromise;
    }
  }
}

TEST(Engine, ObservationListsUnguardedZones) {
  auto e = make_engine();
  const auto o = e.initial_observation(4);
  EXPECT_EQ(o.unguarded_zones, (std::vector<std::string>{zone_id(NetworkId::contractor, ZoneKind::contractor)}));
  EXPECT_EQ(o.peer_zones.size(), 4u);
}
