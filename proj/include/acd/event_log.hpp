#pragma once

#include <iostream>
#include <mutex>
#include <string>
#include <vector>

namespace acd {

/// Append-only, thread-safe sink for operational warnings (invalid actions,
/// transport failures, truncated prompts).
class EventLog {
 public:
  explicit EventLog(bool echo_to_stderr = false) : echo_(echo_to_stderr) {}

  void append(std::string line) {
    std::lock_guard lock(mu_);
    if (echo_) std::cerr << "[acd] " << line << '\n';
    lines_.push_back(std::move(line));
  }

  std::vector<std::string> lines() const {
    std::lock_guard lock(mu_);
    return lines_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return lines_.size();
  }

 private:
  mutable std::mutex mu_;
  bool echo_;
  std::vector<std::string> lines_;
};

}  // namespace acd
