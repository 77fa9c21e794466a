#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <thread>

#include "acd/blue_policy.hpp"
#include "acd/engine.hpp"
#include "acd/errors.hpp"
#include "acd/observation_json.hpp"
#include "acd/remote_policy.hpp"

using namespace acd;

namespace {

BlueObservation view(int agent = 4) {
  const auto state = build_topology(TopologyConfig::defaults());
  BlueObservation o;
  o.agent = agent;
  o.agent_name = blue_agent_name(agent);
  o.step = 5;
  o.zones = state.zones_of(agent);
  o.hosts = state.hosts_of(agent);
  for (int p = 0; p < kBlueAgents; ++p) {
    if (p != agent) o.peer_zones[p] = state.zones_of(p);
  }
  o.comm_vectors.assign(kBlueAgents - 1, CommVector{});
  return o;
}

Alert alert(const std::string& host, Severity sev, std::optional<std::string> source = std::nullopt) {
  return Alert{4, 4, host, sev, std::move(source), "test"};
}

const std::string kHost0 = host_id(NetworkId::headquarters, ZoneKind::office, 0);
const std::string kHost1 = host_id(NetworkId::headquarters, ZoneKind::admin, 1);

/// One-shot line server on an ephemeral TCP port.
class LineServer {
 public:
  LineServer(std::string reply, std::chrono::milliseconds delay = std::chrono::milliseconds(0)) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    ::listen(fd_, 4);
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this, reply = std::move(reply), delay] {
      int c = ::accept(fd_, nullptr, nullptr);
      if (c < 0) return;
      std::string got;
      char buf[4096];
      while (got.find('\n') == std::string::npos) {
        auto n = ::recv(c, buf, sizeof buf, 0);
        if (n <= 0) break;
        got.append(buf, static_cast<std::size_t>(n));
      }
      request_ = got;
      std::this_thread::sleep_for(delay);
      const std::string line = reply + "\n";
      ::send(c, line.data(), line.size(), MSG_NOSIGNAL);
      ::close(c);
    });
  }
  ~LineServer() {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    thread_.join();
  }
  std::string endpoint() const { return "tcp://127.0.0.1:" + std::to_string(port_); }
  std::string request() const { return request_; }

 private:
  int fd_ = -1;
  int port_ = 0;
  std::thread thread_;
  std::string request_;
};

Decision ask_remote(const std::string& reply, std::chrono::milliseconds delay = std::chrono::milliseconds(0),
                    std::chrono::milliseconds timeout = std::chrono::milliseconds(2000)) {
  LineServer server(reply, delay);
  RemotePolicy policy(RemoteEndpoint::parse(server.endpoint()), timeout);
  return policy.decide(view());
}

}  // namespace

TEST(SleepPolicy, AlwaysSleeps) {
  SleepPolicy p;
  auto o = view();
  o.alerts = {alert(kHost0, Severity::ADMIN)};
  const auto d = p.decide(o);
  EXPECT_EQ(d.action.verb, Verb::Sleep);
  EXPECT_TRUE(d.valid);
  EXPECT_EQ(p.kind(), PolicyKind::sleep);
}

TEST(ReactivePolicy, AdminEvidenceRestores) {
  ReactivePolicy p;
  auto o = view();
  o.alerts = {alert(kHost1, Severity::USER), alert(kHost0, Severity::ADMIN)};
  auto d = p.decide(o);
  EXPECT_EQ(d.action.verb, Verb::Restore);
  EXPECT_EQ(*d.action.host(), kHost0);
  o.alerts.clear();
  d = p.decide(o);
  EXPECT_EQ(d.action.verb, Verb::Remove);
  EXPECT_EQ(*d.action.host(), kHost1);
  EXPECT_EQ(p.decide(o).action.verb, Verb::Sleep);
}

TEST(ReactivePolicy, InfoThresholdAccumulates) {
  ReactivePolicy p;
  auto o = view();
  o.alerts = {alert(kHost0, Severity::INFO)};
  EXPECT_EQ(p.decide(o).action.verb, Verb::Sleep);
  const auto d = p.decide(o);
  EXPECT_EQ(d.action.verb, Verb::Analyse);
  EXPECT_EQ(*d.action.host(), kHost0);
  o.alerts.clear();
  EXPECT_EQ(p.decide(o).action.verb, Verb::Sleep);
}

TEST(ReactivePolicy, CustomThreshold) {
  ReactivePolicy p(ReactiveParams{1});
  auto o = view();
  o.alerts = {alert(kHost0, Severity::INFO)};
  EXPECT_EQ(p.decide(o).action.verb, Verb::Analyse);
}

TEST(ReactivePolicy, PeerAdminBlocksThenAllows) {
  ReactivePolicy p;
  auto o = view(0);
  // vectors arrive from agents 1..4; agent 3 reports admin
  o.comm_vectors[2] = encode({{}, ThreatLevel::admin, false}, 3);
  auto d = p.decide(o);
  ASSERT_EQ(d.action.verb, Verb::BlockTrafficZone);
  const ZonePair expected{o.zones.front(), o.peer_zones[3].front()};
  EXPECT_EQ(*d.action.zones(), expected);
  EXPECT_EQ(p.decide(o).action.verb, Verb::Sleep);

  o.comm_vectors[2] = encode({{}, ThreatLevel::user, false}, 3);
  d = p.decide(o);
  ASSERT_EQ(d.action.verb, Verb::AllowTrafficZone);
  EXPECT_EQ(*d.action.zones(), expected);
  EXPECT_TRUE(p.memory().blocks.empty());
}

TEST(ReactivePolicy, BusyWaits) {
  ReactivePolicy p;
  auto o = view();
  o.busy = true;
  o.last_action = AgentAction::on_host(o.agent_name, Verb::Analyse, kHost0);
  o.alerts = {alert(kHost0, Severity::ADMIN)};
  const auto d = p.decide(o);
  EXPECT_EQ(d.action.verb, Verb::Sleep);
  EXPECT_NE(d.reason.find("waiting for Analyse"), std::string::npos);
  // evidence is remembered for later
  o.busy = false;
  o.alerts.clear();
  EXPECT_EQ(p.decide(o).action.verb, Verb::Restore);
}

TEST(CommReport, BuiltFromPostStepView) {
  auto o = view(0);
  const auto peer_zone = o.peer_zones[4].front();
  o.alerts = {alert(o.hosts.front(), Severity::INFO, peer_zone), alert(o.hosts.back(), Severity::USER)};
  o.busy = true;
  const auto r = comm_report_from_decision(o, Decision{});
  EXPECT_EQ(r.detections, (std::set<int>{4}));
  EXPECT_EQ(r.level, ThreatLevel::user);
  EXPECT_TRUE(r.busy);
  EXPECT_NO_THROW(encode(r, 0));

  const auto contractor = zone_id(NetworkId::contractor, ZoneKind::contractor);
  o.alerts = {alert(o.hosts.front(), Severity::INFO, contractor)};
  EXPECT_TRUE(comm_report_from_decision(o, Decision{}).detections.empty());
}

TEST(RemoteEndpoint, Parse) {
  auto tcp = RemoteEndpoint::parse("tcp://127.0.0.1:9000");
  EXPECT_EQ(tcp.kind, RemoteEndpoint::Kind::tcp);
  EXPECT_EQ(tcp.port, 9000);
  auto unix_ep = RemoteEndpoint::parse("unix:///tmp/policy.sock");
  EXPECT_EQ(unix_ep.kind, RemoteEndpoint::Kind::unix_socket);
  EXPECT_EQ(unix_ep.path, "/tmp/policy.sock");
  EXPECT_THROW(RemoteEndpoint::parse("http://x"), ConfigError);
  EXPECT_THROW(RemoteEndpoint::parse("tcp://127.0.0.1"), ConfigError);
}

TEST(RemotePolicy, ValidReply) {
  LineServer server(R"({"verb": "Remove", "target": ")" + kHost0 + R"(", "reason": "trained"})");
  RemotePolicy policy(RemoteEndpoint::parse(server.endpoint()), std::chrono::milliseconds(2000));
  const auto d = policy.decide(view());
  EXPECT_TRUE(d.valid);
  EXPECT_EQ(d.action.verb, Verb::Remove);
  EXPECT_EQ(*d.action.host(), kHost0);
  EXPECT_EQ(d.reason, "trained");
  EXPECT_EQ(policy.failures(), 0);
  auto req = nlohmann::json::parse(server.request());
  EXPECT_EQ(req.at("agent"), "blue_agent_4");
}

TEST(RemotePolicy, RedVerbBecomesSleep) {
  const auto d = ask_remote(R"({"verb": "Impact", "target": "x"})");
  EXPECT_FALSE(d.valid);
  EXPECT_EQ(d.action.verb, Verb::Sleep);
}

TEST(RemotePolicy, MalformedReplyBecomesSleep) {
  const auto d = ask_remote("not json");
  EXPECT_FALSE(d.valid);
  EXPECT_EQ(d.action.verb, Verb::Sleep);
}

TEST(RemotePolicy, TimeoutBecomesSleep) {
  auto log = std::make_shared<EventLog>();
  LineServer server(R"({"verb": "Monitor"})", std::chrono::milliseconds(600));
  RemotePolicy policy(RemoteEndpoint::parse(server.endpoint()), std::chrono::milliseconds(100), log);
  const auto start = std::chrono::steady_clock::now();
  const auto d = policy.decide(view());
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(500));
  EXPECT_FALSE(d.valid);
  EXPECT_EQ(d.action.verb, Verb::Sleep);
  EXPECT_EQ(policy.failures(), 1);
  EXPECT_EQ(log->size(), 1u);
}

TEST(RemotePolicy, RefusedConnectionBecomesSleep) {
  int port = 0;
  {
    LineServer probe("");
    port = std::stoi(probe.endpoint().substr(std::string("tcp://127.0.0.1:").size()));
  }
  RemotePolicy policy(RemoteEndpoint::parse("tcp://127.0.0.1:" + std::to_string(port)), std::chrono::milliseconds(200));
  const auto d = policy.decide(view());
  EXPECT_FALSE(d.valid);
  EXPECT_EQ(d.action.verb, Verb::Sleep);
}
