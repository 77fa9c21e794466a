#include <gtest/gtest.h>

#include "acd/errors.hpp"
#include "acd/net_model.hpp"

using namespace acd;

namespace {

template <typename Fn>
std::string config_error_field(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

const std::string kRestrictedA = zone_id(NetworkId::deployed_a, ZoneKind::restricted);
const std::string kOperationalA = zone_id(NetworkId::deployed_a, ZoneKind::operational);
const std::string kRestrictedB = zone_id(NetworkId::deployed_b, ZoneKind::restricted);
const std::string kOperationalB = zone_id(NetworkId::deployed_b, ZoneKind::operational);
const std::string kOffice = zone_id(NetworkId::headquarters, ZoneKind::office);
const std::string kAdmin = zone_id(NetworkId::headquarters, ZoneKind::admin);
const std::string kContractor = zone_id(NetworkId::contractor, ZoneKind::contractor);

}  // namespace

TEST(NetModel, DefaultTopologyShape) {
  const auto s = build_topology(TopologyConfig::defaults());
  std::set<NetworkId> networks;
  for (const auto& z : s.zones) networks.insert(z.network);
  EXPECT_EQ(networks.size(), 4u);
  EXPECT_EQ(s.zones.size(), 8u);
  EXPECT_EQ(s.hosts.size(), 16u);

  int critical = 0;
  for (const auto& h : s.hosts) critical += h.critical ? 1 : 0;
  EXPECT_EQ(critical, 2);

  for (const auto& z : s.zones) {
    if (z.kind == ZoneKind::contractor) {
      EXPECT_FALSE(z.guardian.has_value());
    } else {
      EXPECT_TRUE(z.guardian.has_value()) << z.id;
    }
  }
  for (int a = 0; a < kBlueAgents; ++a) EXPECT_FALSE(s.zones_of(a).empty());
  EXPECT_EQ(s.zones_of(4).size(), 3u);
  EXPECT_EQ(s.hosts_of(4).size(), 6u);
}

TEST(NetModel, RedStartsOnContractorHost) {
  const auto s = build_topology(TopologyConfig::defaults());
  for (const auto& h : s.hosts) {
    if (h.id == host_id(NetworkId::contractor, ZoneKind::contractor, 0)) {
      EXPECT_EQ(h.compromise, Compromise::user);
    } else {
      EXPECT_EQ(h.compromise, Compromise::clean) << h.id;
    }
  }
}

TEST(NetModel, HostsPerZoneScales) {
  const auto s = build_topology(TopologyConfig::defaults(3));
  EXPECT_EQ(s.hosts.size(), 24u);
  EXPECT_EQ(s.hosts_in_zone(kOffice).size(), 3u);
}

TEST(NetModel, ConfigErrorsNameTheField) {
  EXPECT_EQ(config_error_field([] {
              auto c = TopologyConfig::defaults();
              c.guardians[4].push_back(kRestrictedA);
              build_topology(c);
            }),
            "topology.guardians");
  EXPECT_EQ(config_error_field([] {
              auto c = TopologyConfig::defaults();
              c.guardians[0].push_back(kContractor);
              build_topology(c);
            }),
            "topology.guardians");
  EXPECT_EQ(config_error_field([] {
              auto c = TopologyConfig::defaults();
              c.guardians.erase(3);
              build_topology(c);
            }),
            "topology.guardians");
  EXPECT_EQ(config_error_field([] {
              auto c = TopologyConfig::defaults();
              c.zones.pop_back();
              build_topology(c);
            }),
            "topology.zones");
  EXPECT_EQ(config_error_field([] {
              auto c = TopologyConfig::defaults();
              c.zones[0].kind = ZoneKind::contractor;
              build_topology(c);
            }),
            "topology.zones[0].kind");
  EXPECT_EQ(config_error_field([] {
              auto c = TopologyConfig::defaults();
              c.zones[1].hosts = 0;
              build_topology(c);
            }),
            "topology.zones[1].hosts");
  EXPECT_EQ(config_error_field([] {
              auto c = TopologyConfig::defaults();
              c.decoy_pool = {"ssh"};
              build_topology(c);
            }),
            "topology.decoy_pool");
  EXPECT_EQ(config_error_field([] {
              auto c = TopologyConfig::defaults();
              c.phases = {500, 400, 300};
              build_topology(c);
            }),
            "phases.boundaries");
}

TEST(NetModel, PhaseBoundaries) {
  const PhaseSchedule p{500, 167, 334};
  EXPECT_EQ(phase_at(0, p), MissionPhase::planning);
  EXPECT_EQ(phase_at(166, p), MissionPhase::planning);
  EXPECT_EQ(phase_at(167, p), MissionPhase::mission_a);
  EXPECT_EQ(phase_at(333, p), MissionPhase::mission_a);
  EXPECT_EQ(phase_at(334, p), MissionPhase::mission_b);
  EXPECT_EQ(phase_at(499, p), MissionPhase::mission_b);
  EXPECT_THROW(phase_at(-1, p), RangeError);
  EXPECT_THROW(phase_at(500, p), RangeError);
}

TEST(NetModel, PlanningPermitsEveryPair) {
  const auto s = build_topology(TopologyConfig::defaults());
  EXPECT_EQ(mission_allowed_pairs(s, MissionPhase::planning).size(), 28u);
}

TEST(NetModel, MissionIsolation) {
  const auto s = build_topology(TopologyConfig::defaults());
  const auto a = mission_allowed_pairs(s, MissionPhase::mission_a);
  EXPECT_FALSE(a.contains(ZonePair{kOperationalA, kOffice}));
  EXPECT_FALSE(a.contains(ZonePair{kOperationalA, kContractor}));
  EXPECT_TRUE(a.contains(ZonePair{kOperationalA, kRestrictedA}));
  EXPECT_FALSE(a.contains(ZonePair{kRestrictedB, kContractor}));
  EXPECT_TRUE(a.contains(ZonePair{kRestrictedA, kAdmin}));
  EXPECT_TRUE(a.contains(ZonePair{kOperationalB, kOffice}));

  const auto b = mission_allowed_pairs(s, MissionPhase::mission_b);
  EXPECT_FALSE(b.contains(ZonePair{kOperationalB, kOffice}));
  EXPECT_TRUE(b.contains(ZonePair{kOperationalA, kOffice}));
}

TEST(NetModel, BlocksOverrideConnectivity) {
  auto s = build_topology(TopologyConfig::defaults());
  EXPECT_TRUE(connectivity(s, MissionPhase::planning).permits(kOffice, kContractor));
  s.blocked.insert(ZonePair{kContractor, kOffice});
  const auto policy = connectivity(s, MissionPhase::planning);
  EXPECT_FALSE(policy.permits(kOffice, kContractor));
  EXPECT_FALSE(policy.permits(kContractor, kOffice));
  EXPECT_TRUE(policy.permits(kOffice, kOffice));
}

TEST(NetModel, ZonePairIsUnordered) {
  ZonePair p{"b", "a"};
  EXPECT_EQ(p.first, "a");
  EXPECT_EQ(p.second, "b");
  EXPECT_EQ(p, (ZonePair{"a", "b"}));
  EXPECT_EQ(to_string(p), "a,b");
}

TEST(NetModel, HashTracksDynamicState) {
  auto s = build_topology(TopologyConfig::defaults());
  const auto before = s.hash();
  EXPECT_EQ(before, build_topology(TopologyConfig::defaults()).hash());
  s.find_host(host_id(NetworkId::headquarters, ZoneKind::office, 1))->compromise = Compromise::admin;
  EXPECT_NE(before, s.hash());
}

TEST(NetModel, GuardianLookup) {
  const auto s = build_topology(TopologyConfig::defaults());
  EXPECT_EQ(s.guardian_of_host(host_id(NetworkId::deployed_b, ZoneKind::operational, 0)), 3);
  EXPECT_FALSE(s.guardian_of_host(host_id(NetworkId::contractor, ZoneKind::contractor, 0)).has_value());
  EXPECT_FALSE(s.guardian_of_host("nope").has_value());
}
