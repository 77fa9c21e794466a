#include "acd/llm/mock_chat.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "acd/comm.hpp"
#include "acd/errors.hpp"
#include "acd/llm/observation_format.hpp"

namespace acd::llm {

namespace {

constexpr std::pair<FaultMode, std::string_view> kFaultNames[] = {
    {FaultMode::none, "none"},          {FaultMode::malformed_json, "malformed_json"},
    {FaultMode::prose, "prose"},        {FaultMode::wrong_verb, "wrong_verb"},
    {FaultMode::timeout, "timeout"},    {FaultMode::transport_error, "transport_error"},
};

std::string json_reply(std::string_view action, const std::string& target, const std::string& reason) {
  nlohmann::json j{{"action", action}, {"target", target}, {"reason", reason}};
  return j.dump();
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, sep)) {
    auto b = item.find_first_not_of(' ');
    auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string line_value(std::string_view text, std::string_view label) {
  auto pos = text.find(label);
  if (pos == std::string_view::npos) return {};
  pos += label.size();
  auto end = text.find('\n', pos);
  return std::string(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
}

struct ParsedAlert {
  std::string host;
  std::string severity;
};

std::optional<ParsedAlert> parse_alert_line(const std::string& line) {
  // "[step N] SEV on host: description"
  auto close = line.find("] ");
  if (!line.starts_with("[step ") || close == std::string::npos) return std::nullopt;
  auto rest = line.substr(close + 2);
  auto on = rest.find(" on ");
  auto colon = rest.find(": ");
  if (on == std::string::npos || colon == std::string::npos || colon < on) return std::nullopt;
  return ParsedAlert{rest.substr(on + 4, colon - on - 4), rest.substr(0, on)};
}

int agent_index(const std::string& name) {
  if (!name.starts_with("blue_agent_")) return -1;
  try {
    return std::stoi(name.substr(11));
  } catch (const std::exception&) {
    return -1;
  }
}

}  // namespace

std::string_view to_string(FaultMode mode) {
  for (const auto& [m, name] : kFaultNames) {
    if (m == mode) return name;
  }
  return "none";
}

std::optional<FaultMode> parse_fault_mode(std::string_view text) {
  for (const auto& [m, name] : kFaultNames) {
    if (name == text) return m;
  }
  return std::nullopt;
}

MockScript MockScript::from_json(const nlohmann::json& j) {
  MockScript s;
  if (!j.is_object()) throw ConfigError("llm.mock", "must be an object");
  s.delay = std::chrono::milliseconds(j.value("delay_ms", 0));
  if (s.delay.count() < 0) throw ConfigError("llm.mock.delay_ms", "must be >= 0");
  auto fault = parse_fault_mode(j.value("fault", std::string("none")));
  if (!fault) throw ConfigError("llm.mock.fault", "unknown fault mode");
  s.fault = *fault;
  auto steps_of = [](const nlohmann::json& per_step, const std::string& field) {
    if (!per_step.is_object()) throw ConfigError(field, "must map step numbers to entries");
    std::map<int, nlohmann::json> out;
    for (const auto& [key, value] : per_step.items()) {
      try {
        out[std::stoi(key)] = value;
      } catch (const std::exception&) {
        throw ConfigError(field, "step key '" + key + "' is not an integer");
      }
    }
    return out;
  };
  if (j.contains("replies")) {
    for (const auto& [agent, per_step] : j.at("replies").items()) {
      for (const auto& [step, reply] : steps_of(per_step, "llm.mock.replies")) {
        s.replies[agent][step] = reply.is_string() ? reply.get<std::string>() : reply.dump();
      }
    }
  }
  if (j.contains("faults")) {
    for (const auto& [agent, per_step] : j.at("faults").items()) {
      for (const auto& [step, mode] : steps_of(per_step, "llm.mock.faults")) {
        auto m = mode.is_string() ? parse_fault_mode(mode.get<std::string>()) : std::nullopt;
        if (!m) throw ConfigError("llm.mock.faults", "unknown fault mode " + mode.dump());
        s.faults[agent][step] = *m;
      }
    }
  }
  return s;
}

std::size_t MockScript::fault_count(const std::string& agent, int steps) const {
  std::size_t n = 0;
  for (int step = 0; step < steps; ++step) {
    FaultMode mode = fault;
    for (const auto& key : {std::string("*"), agent}) {
      if (auto it = faults.find(key); it != faults.end()) {
        if (auto f = it->second.find(step); f != it->second.end()) mode = f->second;
      }
    }
    if (mode != FaultMode::none) ++n;
  }
  return n;
}

std::string agent_from_user_message(std::string_view user_message) {
  const std::string_view marker = "Report for ";
  auto pos = user_message.find(marker);
  if (pos == std::string_view::npos) return {};
  pos += marker.size();
  auto end = user_message.find(':', pos);
  if (end == std::string_view::npos) return {};
  return std::string(user_message.substr(pos, end - pos));
}

MockChatClient::MockChatClient(MockScript script) : script_(std::move(script)) {}

int MockChatClient::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::string MockChatClient::complete(const ChatRequest& request, std::chrono::milliseconds timeout) {
  std::string user;
  for (const auto& m : request.messages) {
    if (m.role == "user") user = m.content;
  }
  std::string agent = request.agent.empty() ? agent_from_user_message(user) : request.agent;

  int step = 0;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    int& n = per_agent_calls_[agent];
    step = request.step.value_or(n);
    ++n;
  }

  FaultMode fault = script_.fault;
  std::optional<std::string> scripted;
  for (const auto& key : {std::string("*"), agent}) {
    if (auto it = script_.faults.find(key); it != script_.faults.end()) {
      if (auto f = it->second.find(step); f != it->second.end()) fault = f->second;
    }
    if (auto it = script_.replies.find(key); it != script_.replies.end()) {
      if (auto r = it->second.find(step); r != it->second.end()) scripted = r->second;
    }
  }

  if (fault == FaultMode::timeout) {
    std::this_thread::sleep_for(timeout);
    throw TimeoutError("mock chat endpoint timed out");
  }
  if (script_.delay.count() > 0) std::this_thread::sleep_for(script_.delay);
  switch (fault) {
    case FaultMode::transport_error:
      throw TransportError("mock chat endpoint refused the connection");
    case FaultMode::malformed_json:
      return R"({"action": "Analyse", "target": "hq_office_host_0", "reason": "unterminated)";
    case FaultMode::prose:
      return "I think we should wait.";
    case FaultMode::wrong_verb:
      return json_reply("Impact", "hq_office_host_0", "Take the host down before the intruder does.");
    default:
      break;
  }
  if (scripted) return *scripted;
  return heuristic_reply(agent, user);
}

std::string MockChatClient::heuristic_reply(const std::string& agent, const std::string& user) {
  const auto hosts = split_list(line_value(user, "Hosts you protect: "), ',');
  const auto zones = split_list(line_value(user, "Zones you protect: "), ',');
  std::map<std::string, std::vector<std::string>> peer_zones;
  for (const auto& entry : split_list(line_value(user, "Other defenders' zones: "), ';')) {
    auto arrow = entry.find(" -> ");
    if (arrow == std::string::npos) continue;
    peer_zones[entry.substr(0, arrow)] = split_list(entry.substr(arrow + 4), ',');
  }

  FormattedObservation obs;
  auto begin = user.find(std::string(kFieldLabels[0]) + ": ");
  auto end = user.find("\n\nHosts you protect:");
  try {
    if (begin == std::string::npos) throw FormatError("no observation");
    obs = parse_rendered(std::string_view(user).substr(begin, end == std::string::npos ? std::string::npos : end - begin));
  } catch (const FormatError&) {
    return json_reply("Monitor", "", "The report could not be read, so keep watching the network.");
  }

  std::map<std::string, int> info;
  std::set<std::string> user_hosts;
  std::set<std::string> admin_hosts;
  for (const auto& line : obs.suspicious_activity) {
    auto a = parse_alert_line(line);
    if (!a) continue;
    if (a->severity == "ADMIN") {
      admin_hosts.insert(a->host);
    } else if (a->severity == "USER") {
      user_hosts.insert(a->host);
    } else {
      ++info[a->host];
    }
  }

  std::lock_guard lock(mu_);
  auto& decoyed = decoyed_[agent];

  if (!admin_hosts.empty()) {
    const auto& h = *admin_hosts.begin();
    return json_reply("Restore", h,
                      "Analysis shows admin-level compromise on " + h +
                          "; only a rebuild from a clean image removes an intruder with administrator rights.");
  }
  if (!user_hosts.empty()) {
    const auto& h = *user_hosts.begin();
    return json_reply("Remove", h,
                      "Analysis found a user-level foothold on " + h +
                          ", so removing the malicious processes evicts the intruder without downtime.");
  }
  if (!info.empty()) {
    auto noisy = std::max_element(info.begin(), info.end(),
                                  [](const auto& a, const auto& b) { return a.second < b.second; });
    const auto& h = noisy->first;
    if (obs.last_action == "Analyse " + h && !decoyed.contains(h)) {
      decoyed.insert(h);
      return json_reply("DeployDecoy", h,
                        "Scanning keeps hitting " + h + " after analysis came back clean; a decoy there will catch "
                                                        "the next attempt with certainty.");
    }
    return json_reply("Analyse", h,
                      "There were " + std::to_string(noisy->second) + " suspicious connection(s) to " + h +
                          "; analysing it will show whether the scans led to a compromise.");
  }

  const int self = agent_index(agent);
  if (self >= 0 && obs.communication_vectors.size() == kBlueAgents - 1 && !zones.empty()) {
    const auto peers = peers_of(self);
    for (std::size_t i = 0; i < peers.size(); ++i) {
      CommReport report;
      try {
        report = decode(parse_comm_vector(obs.communication_vectors[i]));
      } catch (const FormatError&) {
        continue;
      }
      if (report.level != ThreatLevel::admin) continue;
      auto pz = peer_zones.find(blue_agent_name(peers[i]));
      if (pz == peer_zones.end() || pz->second.empty()) continue;
      const std::string pair = zones.front() + "," + pz->second.front();
      if (obs.last_action == "BlockTrafficZone " + pair) continue;
      return json_reply("BlockTrafficZone", pair,
                        blue_agent_name(peers[i]) + " reports an admin-level compromise; cutting traffic from " +
                            pz->second.front() + " keeps the intruder from moving into " + zones.front() + ".");
    }
  }

  for (const auto& h : hosts) {
    if (decoyed.contains(h)) continue;
    decoyed.insert(h);
    return json_reply("DeployDecoy", h,
                      "No suspicious activity yet; a decoy service on " + h +
                          " gives early, certain warning if an intruder probes it.");
  }
  return json_reply("Monitor", "",
                    "Every host already has a decoy and nothing suspicious is reported, so keep monitoring.");
}

MockChatServer::MockChatServer(MockScript script)
    : client_(std::make_shared<MockChatClient>(std::move(script))),
      server_([this](const std::string& path, const std::string& body) { return handle(path, body); }) {}

int MockChatServer::start(const std::string& host, int port) { return server_.start(host, port); }

void MockChatServer::serve_forever(const std::string& host, int port) { server_.serve_forever(host, port); }

void MockChatServer::stop() { server_.stop(); }

std::string MockChatServer::url() const {
  return "http://127.0.0.1:" + std::to_string(server_.port()) + "/v1/chat/completions";
}

std::pair<int, std::string> MockChatServer::handle(const std::string& path, const std::string& body) {
  (void)path;
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (!j.is_object() || !j.contains("messages") || !j["messages"].is_array()) {
    return {400, R"({"error": "expected a chat-completion request"})"};
  }
  ChatRequest request;
  request.model = j.value("model", "");
  for (const auto& m : j["messages"]) {
    request.messages.push_back({m.value("role", ""), m.value("content", "")});
  }
  for (const auto& m : request.messages) {
    if (m.role == "user") request.agent = agent_from_user_message(m.content);
  }
  {
    std::lock_guard lock(mu_);
    request.step = call_index_[request.agent]++;
  }
  try {
    const auto content = client_->complete(request, std::chrono::milliseconds(1000));
    nlohmann::json reply{{"object", "chat.completion"},
                         {"model", request.model},
                         {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}},
                                       {"finish_reason", "stop"}}}}};
    return {200, reply.dump()};
  } catch (const TransportError& e) {
    return {503, nlohmann::json{{"error", e.what()}}.dump()};
  }
}

}  // namespace acd::llm
