#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace acd {

inline constexpr int kBlueAgents = 5;

enum class ZoneKind { restricted, operational, public_access, admin, office, contractor };
enum class NetworkId { deployed_a, deployed_b, headquarters, contractor };
enum class MissionPhase { planning, mission_a, mission_b };
enum class Compromise { clean = 0, user = 1, admin = 2 };

std::string_view to_string(ZoneKind kind);
std::string_view to_string(NetworkId network);
std::string_view to_string(MissionPhase phase);
std::string_view to_string(Compromise level);
std::optional<ZoneKind> parse_zone_kind(std::string_view text);
std::optional<NetworkId> parse_network(std::string_view text);

/// Short token used in zone and host ids ("deployed_a", "hq", ...).
std::string_view id_token(NetworkId network);

std::string zone_id(NetworkId network, ZoneKind kind);
std::string host_id(NetworkId network, ZoneKind kind, int index);
std::string blue_agent_name(int index);
inline constexpr std::string_view kRedAgentName = "red_agent_0";

/// Unordered pair of zone ids, stored with first <= second.
struct ZonePair {
  std::string first;
  std::string second;

  ZonePair() = default;
  ZonePair(std::string a, std::string b);

  bool contains(std::string_view zone) const { return first == zone || second == zone; }
  auto operator<=>(const ZonePair&) const = default;
};

std::string to_string(const ZonePair& pair);

struct Zone {
  std::string id;
  ZoneKind kind = ZoneKind::office;
  NetworkId network = NetworkId::headquarters;
  std::optional<int> guardian;
};

struct Host {
  std::string id;
  std::string zone;
  std::set<std::string> services;
  bool critical = false;
  Compromise compromise = Compromise::clean;
  std::set<std::string> decoys;
  /// First step at which the host is back in operation.
  std::optional<int> unavailable_until;
  /// Step at which unavailable_until was last set.
  std::optional<int> unavailable_since;
  /// A red DegradeService is in effect until Remove/Restore.
  bool degraded = false;

  bool available_at(int step) const { return !unavailable_until || step >= *unavailable_until; }
};

struct PhaseSchedule {
  int episode_length = 500;
  int mission_a_start = 167;
  int mission_b_start = 334;
};

struct ZoneSpec {
  NetworkId network = NetworkId::headquarters;
  ZoneKind kind = ZoneKind::office;
  int hosts = 2;
  std::vector<int> critical_hosts;
  std::vector<std::string> services;
};

struct TopologyConfig {
  std::vector<ZoneSpec> zones;
  /// Blue agent index -> zone ids it guards.
  std::map<int, std::vector<std::string>> guardians;
  /// Zone pairs permitted before mission isolation; empty means every pair.
  std::set<ZonePair> allowed_pairs;
  std::vector<std::string> decoy_pool{"decoy_apache", "decoy_smtp", "decoy_tomcat"};
  PhaseSchedule phases;

  /// Four networks, eight zones, two hosts per zone, one critical host per
  /// operational zone; agents 0-3 guard the deployed zones, agent 4 guards HQ.
  static TopologyConfig defaults(int hosts_per_zone = 2);
};

struct ConnectivityPolicy {
  std::set<ZonePair> allowed;
  std::set<ZonePair> blocked_overrides;

  /// Same-zone traffic is always permitted.
  bool permits(std::string_view a, std::string_view b) const;
};

/// The single source of simulation truth: topology plus per-host dynamic state.
class NetworkState {
 public:
  std::vector<Zone> zones;
  std::vector<Host> hosts;
  std::set<ZonePair> configured_pairs;
  std::set<ZonePair> blocked;
  std::vector<std::string> decoy_pool;
  PhaseSchedule phases;

  const Host* find_host(std::string_view id) const;
  Host* find_host(std::string_view id);
  const Zone* find_zone(std::string_view id) const;

  /// Guardian of the zone containing `host`, if any.
  std::optional<int> guardian_of_host(std::string_view host) const;
  std::vector<std::string> zones_of(int agent) const;
  std::vector<std::string> hosts_of(int agent) const;
  std::vector<std::string> hosts_in_zone(std::string_view zone) const;

  /// Stable 64-bit digest over all dynamic and static state.
  std::uint64_t hash() const;
};

/// Builds a network satisfying the zone/guardian invariants. Throws ConfigError
/// naming the offending field when the configuration is malformed.
NetworkState build_topology(const TopologyConfig& config);

/// Throws RangeError if step is outside [0, episode_length).
MissionPhase phase_at(int step, const PhaseSchedule& schedule);

/// Configured pairs that survive the mission isolation rules of `phase`,
/// before any blue block is applied.
std::set<ZonePair> mission_allowed_pairs(const NetworkState& state, MissionPhase phase);

/// Effective policy: mission_allowed_pairs minus the blue block overrides.
ConnectivityPolicy connectivity(const NetworkState& state, MissionPhase phase);

}  // namespace acd
