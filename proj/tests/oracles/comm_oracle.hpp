#pragma once

// Reads the broadcast byte field by field with plain shifts, independent of the
// library's encoder.

#include <cstdint>
#include <set>

namespace oracle {

struct Fields {
  std::set<int> detections;
  int level = 0;  // 0 none, 1 scan, 2 user, 3 admin
  bool busy = false;
};

inline Fields fields_of(std::uint8_t byte) {
  Fields f;
  for (int i = 0; i < 5; ++i)
    if ((byte >> i) & 1U) f.detections.insert(i);
  const int b5 = (byte >> 5) & 1U;
  const int b6 = (byte >> 6) & 1U;
  // (bit5, bit6) read as a two-digit binary number, bit5 first
  f.level = b5 * 2 + b6;
  f.busy = ((byte >> 7) & 1U) != 0;
  return f;
}

}  // namespace oracle
