#include "acd/comm.hpp"

#include <cctype>

#include "acd/errors.hpp"
#include "acd/net_model.hpp"

namespace acd {

std::string_view to_string(ThreatLevel level) {
  switch (level) {
    case ThreatLevel::none: return "none";
    case ThreatLevel::scan: return "scan";
    case ThreatLevel::user: return "user";
    case ThreatLevel::admin: return "admin";
  }
  return "?";
}

CommVector encode(const CommReport& report, int self_index) {
  CommVector out;
  for (int j : report.detections) {
    if (j < 0 || j >= kBlueAgents) {
      throw ContractViolation("encode: detection index " + std::to_string(j) + " outside 0..4");
    }
    if (j == self_index) {
      throw ContractViolation("encode: agent " + std::to_string(self_index) + " cannot flag its own network");
    }
    out.bits[static_cast<std::size_t>(j)] = 1;
  }
  const int code = static_cast<int>(report.level);
  out.bits[5] = static_cast<std::uint8_t>((code >> 1) & 1);
  out.bits[6] = static_cast<std::uint8_t>(code & 1);
  out.bits[7] = report.busy ? 1 : 0;
  return out;
}

CommReport decode(const CommVector& vector) {
  CommReport report;
  for (int j = 0; j < kBlueAgents; ++j) {
    if (vector.bits[static_cast<std::size_t>(j)]) report.detections.insert(j);
  }
  report.level = static_cast<ThreatLevel>((vector.bits[5] ? 2 : 0) | (vector.bits[6] ? 1 : 0));
  report.busy = vector.bits[7] != 0;
  return report;
}

CommReport decode(std::span<const int> bits) {
  if (bits.size() != 8) {
    throw FormatError("comm vector must have 8 entries, got " + std::to_string(bits.size()));
  }
  CommVector v;
  for (std::size_t i = 0; i < 8; ++i) {
    if (bits[i] != 0 && bits[i] != 1) {
      throw FormatError("comm vector entry " + std::to_string(i) + " is not binary");
    }
    v.bits[i] = static_cast<std::uint8_t>(bits[i]);
  }
  return decode(v);
}

std::uint8_t to_byte(const CommVector& vector) {
  std::uint8_t b = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    if (vector.bits[i]) b = static_cast<std::uint8_t>(b | (1U << i));
  }
  return b;
}

CommVector from_byte(std::uint8_t byte) {
  CommVector v;
  for (std::size_t i = 0; i < 8; ++i) v.bits[i] = (byte >> i) & 1U;
  return v;
}

std::string to_string(const CommVector& vector) {
  std::string out = "[";
  for (std::size_t i = 0; i < 8; ++i) {
    if (i) out += ',';
    out += vector.bits[i] ? '1' : '0';
  }
  out += ']';
  return out;
}

CommVector parse_comm_vector(std::string_view text) {
  std::vector<int> values;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i >= text.size() || text[i] != '[') throw FormatError("comm vector must start with '['");
  ++i;
  skip_ws();
  if (i < text.size() && text[i] == ']') {
    ++i;
  } else {
    while (true) {
      skip_ws();
      if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) {
        throw FormatError("comm vector: expected a digit at offset " + std::to_string(i));
      }
      int value = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        value = value * 10 + (text[i] - '0');
        if (value > 9) throw FormatError("comm vector entry is not binary");
        ++i;
      }
      values.push_back(value);
      skip_ws();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == ']') {
        ++i;
        break;
      }
      throw FormatError("comm vector: expected ',' or ']'");
    }
  }
  skip_ws();
  if (i != text.size()) throw FormatError("comm vector: trailing characters");
  const CommReport unused = decode(std::span<const int>(values));
  (void)unused;
  CommVector v;
  for (std::size_t k = 0; k < 8; ++k) v.bits[k] = static_cast<std::uint8_t>(values[k]);
  return v;
}

std::vector<int> peers_of(int receiver) {
  std::vector<int> out;
  for (int j = 0; j < kBlueAgents; ++j) {
    if (j != receiver) out.push_back(j);
  }
  return out;
}

std::map<int, std::vector<CommVector>> broadcast(const std::map<int, CommReport>& reports) {
  std::array<CommVector, kBlueAgents> encoded;
  for (int agent = 0; agent < kBlueAgents; ++agent) {
    auto it = reports.find(agent);
    if (it == reports.end()) {
      throw ProtocolError("broadcast: missing report from " + blue_agent_name(agent));
    }
    encoded[static_cast<std::size_t>(agent)] = encode(it->second, agent);
  }
  std::map<int, std::vector<CommVector>> delivered;
  for (int receiver = 0; receiver < kBlueAgents; ++receiver) {
    auto& inbox = delivered[receiver];
    for (int sender : peers_of(receiver)) inbox.push_back(encoded[static_cast<std::size_t>(sender)]);
  }
  return delivered;
}

}  // namespace acd
