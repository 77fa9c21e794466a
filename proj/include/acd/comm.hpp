#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace acd {

/// Wire layout of the per-step defender broadcast (index 0 is the first element):
///
///   bits 0..4  detection flags; bit j set iff activity was attributed to agent j's network
///   bits 5..6  compromise level code read as (bit5, bit6):
///              00 none, 01 scan / remote exploit, 10 user-level, 11 admin-level
///   bit  7     busy: the sender is waiting for an action to finish
struct CommVector {
  std::array<std::uint8_t, 8> bits{};

  bool operator==(const CommVector&) const = default;
};

enum class ThreatLevel { none = 0, scan = 1, user = 2, admin = 3 };

std::string_view to_string(ThreatLevel level);

struct CommReport {
  std::set<int> detections;
  ThreatLevel level = ThreatLevel::none;
  bool busy = false;

  bool operator==(const CommReport&) const = default;
};

/// Throws ContractViolation when `report.detections` contains `self_index` or an
/// index outside 0..4.
CommVector encode(const CommReport& report, int self_index);

CommReport decode(const CommVector& vector);

/// Validating decode from loose integers. Throws FormatError on a length other
/// than 8 or any entry outside {0, 1}.
CommReport decode(std::span<const int> bits);

/// Bit i of the byte is array element i.
std::uint8_t to_byte(const CommVector& vector);
CommVector from_byte(std::uint8_t byte);

/// "[0,0,0,1,0,1,0,1]"
std::string to_string(const CommVector& vector);
/// Inverse of to_string; whitespace tolerated. Throws FormatError.
CommVector parse_comm_vector(std::string_view text);

/// Agents whose vectors `receiver` gets, in delivery order.
std::vector<int> peers_of(int receiver);

/// Fans every agent's report out to the other four in ascending sender order.
/// Throws ProtocolError naming the first agent (0..4) without a report.
std::map<int, std::vector<CommVector>> broadcast(const std::map<int, CommReport>& reports);

}  // namespace acd
