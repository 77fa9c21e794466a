#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>

#include "acd/blue_policy.hpp"
#include "acd/event_log.hpp"

namespace acd {

/// "tcp://127.0.0.1:9000" or "unix:///tmp/policy.sock".
struct RemoteEndpoint {
  enum class Kind { tcp, unix_socket } kind = Kind::tcp;
  std::string host = "127.0.0.1";
  int port = 0;
  std::string path;

  /// Throws ConfigError on an unrecognised form.
  static RemoteEndpoint parse(const std::string& text);
};

/// Sends one newline-terminated JSON request over a fresh connection and reads
/// one newline-terminated reply. Throws std::runtime_error on connection
/// failure or when the deadline passes.
std::string exchange_line(const RemoteEndpoint& endpoint, const std::string& request,
                          std::chrono::milliseconds timeout);

/// Defers decisions to an external process (for example a trained policy).
/// Request: the structured observation as JSON; reply: {"verb": ..., "target": ...}.
/// Any failure (timeout, refused connection, malformed reply, non-blue verb)
/// yields Sleep marked invalid and a log line.
class RemotePolicy final : public BluePolicy {
 public:
  RemotePolicy(RemoteEndpoint endpoint, std::chrono::milliseconds timeout, std::shared_ptr<EventLog> log = nullptr);

  PolicyKind kind() const override { return PolicyKind::remote; }
  Decision decide(const BlueObservation& observation) override;

  int failures() const { return failures_.load(); }

 private:
  RemoteEndpoint endpoint_;
  std::chrono::milliseconds timeout_;
  std::shared_ptr<EventLog> log_;
  std::atomic<int> failures_{0};
};

}  // namespace acd
