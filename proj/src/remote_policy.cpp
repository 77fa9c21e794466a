#include "acd/remote_policy.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "acd/errors.hpp"
#include "acd/observation_json.hpp"

namespace acd {

namespace {

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

void wait_for(int fd, short events, Clock::time_point deadline, const char* what) {
  while (true) {
    pollfd p{fd, events, 0};
    int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc > 0) return;
    if (rc == 0) throw std::runtime_error(std::string("timeout while ") + what);
    if (errno != EINTR) throw std::runtime_error(std::string("poll failed while ") + what);
  }
}

}  // namespace

RemoteEndpoint RemoteEndpoint::parse(const std::string& text) {
  RemoteEndpoint ep;
  if (text.starts_with("unix://")) {
    ep.kind = Kind::unix_socket;
    ep.path = text.substr(7);
    if (ep.path.empty()) throw ConfigError("remote.endpoint", "empty unix socket path");
    return ep;
  }
  std::string rest = text.starts_with("tcp://") ? text.substr(6) : text;
  auto colon = rest.rfind(':');
  if (colon == std::string::npos) throw ConfigError("remote.endpoint", "expected host:port in '" + text + "'");
  ep.host = rest.substr(0, colon);
  try {
    ep.port = std::stoi(rest.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("remote.endpoint", "bad port in '" + text + "'");
  }
  if (ep.port <= 0 || ep.port > 65535) throw ConfigError("remote.endpoint", "port out of range");
  return ep;
}

std::string exchange_line(const RemoteEndpoint& endpoint, const std::string& request,
                          std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  const int domain = endpoint.kind == RemoteEndpoint::Kind::tcp ? AF_INET : AF_UNIX;
  Fd sock(::socket(domain, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (sock.get() < 0) throw std::runtime_error("socket() failed");
  ::fcntl(sock.get(), F_SETFL, ::fcntl(sock.get(), F_GETFL) | O_NONBLOCK);

  int rc;
  if (endpoint.kind == RemoteEndpoint::Kind::tcp) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(endpoint.port));
    const std::string host = endpoint.host == "localhost" ? "127.0.0.1" : endpoint.host;
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      throw std::runtime_error("remote policy host must be a numeric IPv4 address: " + endpoint.host);
    }
    rc = ::connect(sock.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  } else {
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (endpoint.path.size() >= sizeof addr.sun_path) throw std::runtime_error("unix socket path too long");
    std::strncpy(addr.sun_path, endpoint.path.c_str(), sizeof addr.sun_path - 1);
    rc = ::connect(sock.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  }
  if (rc < 0 && errno != EINPROGRESS) {
    throw std::runtime_error(std::string("connect failed: ") + std::strerror(errno));
  }
  if (rc < 0) {
    wait_for(sock.get(), POLLOUT, deadline, "connecting");
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(sock.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) throw std::runtime_error(std::string("connect failed: ") + std::strerror(err));
  }

  std::string payload = request;
  if (payload.empty() || payload.back() != '\n') payload.push_back('\n');
  std::size_t sent = 0;
  while (sent < payload.size()) {
    wait_for(sock.get(), POLLOUT, deadline, "sending");
    auto n = ::send(sock.get(), payload.data() + sent, payload.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      throw std::runtime_error(std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }

  std::string reply;
  char buf[4096];
  while (true) {
    auto nl = reply.find('\n');
    if (nl != std::string::npos) return reply.substr(0, nl);
    wait_for(sock.get(), POLLIN, deadline, "waiting for reply");
    auto n = ::recv(sock.get(), buf, sizeof buf, 0);
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      throw std::runtime_error(std::string("recv failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (reply.empty()) throw std::runtime_error("connection closed without reply");
      return reply;
    }
    reply.append(buf, static_cast<std::size_t>(n));
  }
}

RemotePolicy::RemotePolicy(RemoteEndpoint endpoint, std::chrono::milliseconds timeout, std::shared_ptr<EventLog> log)
    : endpoint_(std::move(endpoint)), timeout_(timeout), log_(std::move(log)) {}

Decision RemotePolicy::decide(const BlueObservation& observation) {
  Decision d;
  d.action = AgentAction::sleep(observation.agent_name);

  auto fail = [&](std::string error) {
    d.valid = false;
    d.error = std::move(error);
    ++failures_;
    if (log_) {
      log_->append(observation.agent_name + " step " + std::to_string(observation.step) +
                   ": invalid remote action (" + d.error + "), sleeping");
    }
    return d;
  };

  std::string reply;
  try {
    reply = exchange_line(endpoint_, to_json(observation).dump(), timeout_);
  } catch (const std::exception& e) {
    return fail(e.what());
  }

  nlohmann::json j = nlohmann::json::parse(reply, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("verb") || !j["verb"].is_string()) {
    return fail("malformed reply: " + reply);
  }
  const auto verb = parse_verb(j["verb"].get<std::string>());
  if (!verb || !verb_allowed_for(Color::blue, *verb)) {
    return fail("not a blue verb: " + j["verb"].get<std::string>());
  }
  auto target = parse_action_target(*verb, j.value("target", nlohmann::json()));
  if (!target) return fail("bad target for " + std::string(to_string(*verb)));
  d.action = AgentAction{observation.agent_name, *verb, std::move(*target), ScanMode::loud};
  d.reason = j.value("reason", "");
  return d;
}

}  // namespace acd
