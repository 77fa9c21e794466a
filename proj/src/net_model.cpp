#include "acd/net_model.hpp"

#include <algorithm>
#include <array>

#include "acd/errors.hpp"
#include "acd/hashing.hpp"

namespace acd {

namespace {

constexpr std::array<std::pair<NetworkId, ZoneKind>, 8> kRequiredZones{{
    {NetworkId::deployed_a, ZoneKind::restricted},
    {NetworkId::deployed_a, ZoneKind::operational},
    {NetworkId::deployed_b, ZoneKind::restricted},
    {NetworkId::deployed_b, ZoneKind::operational},
    {NetworkId::headquarters, ZoneKind::public_access},
    {NetworkId::headquarters, ZoneKind::admin},
    {NetworkId::headquarters, ZoneKind::office},
    {NetworkId::contractor, ZoneKind::contractor},
}};

bool kind_belongs_to(NetworkId network, ZoneKind kind) {
  switch (network) {
    case NetworkId::deployed_a:
    case NetworkId::deployed_b:
      return kind == ZoneKind::restricted || kind == ZoneKind::operational;
    case NetworkId::headquarters:
      return kind == ZoneKind::public_access || kind == ZoneKind::admin || kind == ZoneKind::office;
    case NetworkId::contractor:
      return kind == ZoneKind::contractor;
  }
  return false;
}

}  // namespace

std::string_view to_string(ZoneKind kind) {
  switch (kind) {
    case ZoneKind::restricted: return "restricted";
    case ZoneKind::operational: return "operational";
    case ZoneKind::public_access: return "public_access";
    case ZoneKind::admin: return "admin";
    case ZoneKind::office: return "office";
    case ZoneKind::contractor: return "contractor";
  }
  return "?";
}

std::string_view to_string(NetworkId network) {
  switch (network) {
    case NetworkId::deployed_a: return "deployed_A";
    case NetworkId::deployed_b: return "deployed_B";
    case NetworkId::headquarters: return "headquarters";
    case NetworkId::contractor: return "contractor";
  }
  return "?";
}

std::string_view id_token(NetworkId network) {
  switch (network) {
    case NetworkId::deployed_a: return "deployed_a";
    case NetworkId::deployed_b: return "deployed_b";
    case NetworkId::headquarters: return "hq";
    case NetworkId::contractor: return "contractor";
  }
  return "?";
}

std::string_view to_string(MissionPhase phase) {
  switch (phase) {
    case MissionPhase::planning: return "Planning";
    case MissionPhase::mission_a: return "Mission A";
    case MissionPhase::mission_b: return "Mission B";
  }
  return "?";
}

std::string_view to_string(Compromise level) {
  switch (level) {
    case Compromise::clean: return "clean";
    case Compromise::user: return "user";
    case Compromise::admin: return "admin";
  }
  return "?";
}

std::optional<ZoneKind> parse_zone_kind(std::string_view text) {
  for (auto kind : {ZoneKind::restricted, ZoneKind::operational, ZoneKind::public_access, ZoneKind::admin,
                    ZoneKind::office, ZoneKind::contractor}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::optional<NetworkId> parse_network(std::string_view text) {
  for (auto net : {NetworkId::deployed_a, NetworkId::deployed_b, NetworkId::headquarters, NetworkId::contractor}) {
    if (to_string(net) == text || id_token(net) == text) return net;
  }
  return std::nullopt;
}

std::string zone_id(NetworkId network, ZoneKind kind) {
  return std::string(id_token(network)) + "_" + std::string(to_string(kind));
}

std::string host_id(NetworkId network, ZoneKind kind, int index) {
  return zone_id(network, kind) + "_host_" + std::to_string(index);
}

std::string blue_agent_name(int index) { return "blue_agent_" + std::to_string(index); }

ZonePair::ZonePair(std::string a, std::string b) : first(std::move(a)), second(std::move(b)) {
  if (second < first) std::swap(first, second);
}

std::string to_string(const ZonePair& pair) { return pair.first + "," + pair.second; }

TopologyConfig TopologyConfig::defaults(int hosts_per_zone) {
  TopologyConfig config;
  for (const auto& [network, kind] : kRequiredZones) {
    ZoneSpec spec;
    spec.network = network;
    spec.kind = kind;
    spec.hosts = hosts_per_zone;
    if (kind == ZoneKind::operational) spec.critical_hosts = {0};
    if (kind == ZoneKind::contractor) {
      spec.services = {"ssh"};
    } else if (kind == ZoneKind::operational) {
      spec.services = {"http", "mission_db", "ssh"};
    } else {
      spec.services = {"http", "ssh"};
    }
    config.zones.push_back(std::move(spec));
  }
  config.guardians = {
      {0, {zone_id(NetworkId::deployed_a, ZoneKind::restricted)}},
      {1, {zone_id(NetworkId::deployed_a, ZoneKind::operational)}},
      {2, {zone_id(NetworkId::deployed_b, ZoneKind::restricted)}},
      {3, {zone_id(NetworkId::deployed_b, ZoneKind::operational)}},
      {4,
       {zone_id(NetworkId::headquarters, ZoneKind::public_access), zone_id(NetworkId::headquarters, ZoneKind::admin),
        zone_id(NetworkId::headquarters, ZoneKind::office)}},
  };
  return config;
}

bool ConnectivityPolicy::permits(std::string_view a, std::string_view b) const {
  if (a == b) return true;
  ZonePair pair{std::string(a), std::string(b)};
  return allowed.contains(pair) && !blocked_overrides.contains(pair);
}

const Host* NetworkState::find_host(std::string_view id) const {
  auto it = std::find_if(hosts.begin(), hosts.end(), [&](const Host& h) { return h.id == id; });
  return it == hosts.end() ? nullptr : &*it;
}

Host* NetworkState::find_host(std::string_view id) {
  auto it = std::find_if(hosts.begin(), hosts.end(), [&](const Host& h) { return h.id == id; });
  return it == hosts.end() ? nullptr : &*it;
}

const Zone* NetworkState::find_zone(std::string_view id) const {
  auto it = std::find_if(zones.begin(), zones.end(), [&](const Zone& z) { return z.id == id; });
  return it == zones.end() ? nullptr : &*it;
}

std::optional<int> NetworkState::guardian_of_host(std::string_view host) const {
  const Host* h = find_host(host);
  if (!h) return std::nullopt;
  const Zone* z = find_zone(h->zone);
  return z ? z->guardian : std::nullopt;
}

std::vector<std::string> NetworkState::zones_of(int agent) const {
  std::vector<std::string> out;
  for (const auto& z : zones) {
    if (z.guardian == agent) out.push_back(z.id);
  }
  return out;
}

std::vector<std::string> NetworkState::hosts_of(int agent) const {
  std::vector<std::string> out;
  for (const auto& h : hosts) {
    const Zone* z = find_zone(h.zone);
    if (z && z->guardian == agent) out.push_back(h.id);
  }
  return out;
}

std::vector<std::string> NetworkState::hosts_in_zone(std::string_view zone) const {
  std::vector<std::string> out;
  for (const auto& h : hosts) {
    if (h.zone == zone) out.push_back(h.id);
  }
  return out;
}

std::uint64_t NetworkState::hash() const {
  Fnv1a fnv;
  for (const auto& z : zones) {
    fnv.add(z.id).add(static_cast<std::int64_t>(z.guardian.value_or(-1)));
  }
  for (const auto& h : hosts) {
    fnv.add(h.id).add(h.zone).add(static_cast<std::int64_t>(h.compromise));
    fnv.add(static_cast<std::int64_t>(h.critical)).add(static_cast<std::int64_t>(h.degraded));
    fnv.add(static_cast<std::int64_t>(h.unavailable_until.value_or(-1)));
    for (const auto& s : h.services) fnv.add(s);
    fnv.add("|");
    for (const auto& d : h.decoys) fnv.add(d);
    fnv.add("|");
  }
  for (const auto& p : blocked) fnv.add(p.first).add(p.second);
  return fnv.value();
}

NetworkState build_topology(const TopologyConfig& config) {
  NetworkState state;
  state.phases = config.phases;
  state.decoy_pool = config.decoy_pool;

  std::set<std::pair<NetworkId, ZoneKind>> seen;
  for (std::size_t i = 0; i < config.zones.size(); ++i) {
    const auto& spec = config.zones[i];
    const std::string field = "topology.zones[" + std::to_string(i) + "]";
    if (!kind_belongs_to(spec.network, spec.kind)) {
      throw ConfigError(field + ".kind", "zone kind '" + std::string(to_string(spec.kind)) +
                                             "' is not part of network '" + std::string(to_string(spec.network)) + "'");
    }
    if (!seen.insert({spec.network, spec.kind}).second) {
      throw ConfigError(field, "duplicate zone " + zone_id(spec.network, spec.kind));
    }
    if (spec.hosts < 1) throw ConfigError(field + ".hosts", "each zone needs at least one host");
    for (int c : spec.critical_hosts) {
      if (c < 0 || c >= spec.hosts) throw ConfigError(field + ".critical_hosts", "index out of range");
    }
  }
  for (const auto& [network, kind] : kRequiredZones) {
    if (!seen.contains({network, kind})) {
      throw ConfigError("topology.zones", "missing zone " + zone_id(network, kind));
    }
  }

  // Canonical zone order regardless of config order.
  for (const auto& [network, kind] : kRequiredZones) {
    const auto& spec = *std::find_if(config.zones.begin(), config.zones.end(),
                                     [&](const ZoneSpec& s) { return s.network == network && s.kind == kind; });
    Zone zone;
    zone.id = zone_id(network, kind);
    zone.kind = kind;
    zone.network = network;
    state.zones.push_back(zone);
    for (int n = 0; n < spec.hosts; ++n) {
      Host host;
      host.id = host_id(network, kind, n);
      host.zone = zone.id;
      host.services.insert(spec.services.begin(), spec.services.end());
      host.critical = std::find(spec.critical_hosts.begin(), spec.critical_hosts.end(), n) != spec.critical_hosts.end();
      state.hosts.push_back(std::move(host));
    }
  }

  for (const auto& [agent, zone_ids] : config.guardians) {
    if (agent < 0 || agent >= kBlueAgents) {
      throw ConfigError("topology.guardians", "agent index " + std::to_string(agent) + " outside 0..4");
    }
    for (const auto& zid : zone_ids) {
      auto it = std::find_if(state.zones.begin(), state.zones.end(), [&](const Zone& z) { return z.id == zid; });
      if (it == state.zones.end()) throw ConfigError("topology.guardians", "unknown zone " + zid);
      if (it->kind == ZoneKind::contractor) {
        throw ConfigError("topology.guardians", "contractor zone " + zid + " cannot have a guardian");
      }
      if (it->guardian) {
        throw ConfigError("topology.guardians", "zone " + zid + " has two guardians (" +
                                                    std::to_string(*it->guardian) + " and " + std::to_string(agent) +
                                                    ")");
      }
      it->guardian = agent;
    }
  }
  for (const auto& z : state.zones) {
    if (z.kind != ZoneKind::contractor && !z.guardian) {
      throw ConfigError("topology.guardians", "zone " + z.id + " has no guardian");
    }
  }
  for (int agent = 0; agent < kBlueAgents; ++agent) {
    if (!config.guardians.contains(agent) || config.guardians.at(agent).empty()) {
      throw ConfigError("topology.guardians", "agent " + std::to_string(agent) + " guards no zone");
    }
  }

  for (const auto& name : config.decoy_pool) {
    for (const auto& h : state.hosts) {
      if (h.services.contains(name)) {
        throw ConfigError("topology.decoy_pool", "decoy '" + name + "' collides with a real service on " + h.id);
      }
    }
  }

  if (config.allowed_pairs.empty()) {
    for (std::size_t i = 0; i < state.zones.size(); ++i) {
      for (std::size_t j = i + 1; j < state.zones.size(); ++j) {
        state.configured_pairs.insert(ZonePair{state.zones[i].id, state.zones[j].id});
      }
    }
  } else {
    for (const auto& p : config.allowed_pairs) {
      if (!state.find_zone(p.first) || !state.find_zone(p.second)) {
        throw ConfigError("topology.allowed_pairs", "unknown zone in pair " + to_string(p));
      }
      if (p.first != p.second) state.configured_pairs.insert(p);
    }
  }

  const auto& ph = config.phases;
  if (ph.episode_length < 1) throw ConfigError("phases.episode_length", "must be >= 1");
  if (ph.mission_a_start < 0 || ph.mission_a_start > ph.mission_b_start || ph.mission_b_start > ph.episode_length) {
    throw ConfigError("phases.boundaries", "need 0 <= mission_a_start <= mission_b_start <= episode_length");
  }

  // Red foothold: first contractor host at user level.
  for (auto& h : state.hosts) {
    if (h.zone == zone_id(NetworkId::contractor, ZoneKind::contractor)) {
      h.compromise = Compromise::user;
      break;
    }
  }
  return state;
}

MissionPhase phase_at(int step, const PhaseSchedule& schedule) {
  if (step < 0 || step >= schedule.episode_length) {
    throw RangeError("phase_at: step " + std::to_string(step) + " outside [0, " +
                     std::to_string(schedule.episode_length) + ")");
  }
  if (step < schedule.mission_a_start) return MissionPhase::planning;
  if (step < schedule.mission_b_start) return MissionPhase::mission_a;
  return MissionPhase::mission_b;
}

std::set<ZonePair> mission_allowed_pairs(const NetworkState& state, MissionPhase phase) {
  std::optional<NetworkId> active;
  if (phase == MissionPhase::mission_a) active = NetworkId::deployed_a;
  if (phase == MissionPhase::mission_b) active = NetworkId::deployed_b;

  auto isolated = [&](const Zone& z, const Zone& other) {
    if (!active) return false;
    if (z.kind == ZoneKind::operational && z.network == *active) return other.network != z.network;
    if (z.kind == ZoneKind::restricted) {
      return other.network != z.network && other.network != NetworkId::headquarters;
    }
    return false;
  };

  std::set<ZonePair> allowed;
  for (const auto& pair : state.configured_pairs) {
    const Zone* a = state.find_zone(pair.first);
    const Zone* b = state.find_zone(pair.second);
    if (!a || !b) continue;
    if (isolated(*a, *b) || isolated(*b, *a)) continue;
    allowed.insert(pair);
  }
  return allowed;
}

ConnectivityPolicy connectivity(const NetworkState& state, MissionPhase phase) {
  ConnectivityPolicy policy;
  policy.blocked_overrides = state.blocked;
  for (const auto& pair : mission_allowed_pairs(state, phase)) {
    if (!state.blocked.contains(pair)) policy.allowed.insert(pair);
  }
  return policy;
}

}  // namespace acd
