#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace acd {

/// Incremental FNV-1a (64-bit). Used for state digests, not for security.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view bytes) {
    for (unsigned char c : bytes) {
      value_ ^= c;
      value_ *= 0x100000001b3ULL;
    }
    // Field separator so ("ab","c") and ("a","bc") differ.
    value_ ^= 0xffU;
    value_ *= 0x100000001b3ULL;
    return *this;
  }

  Fnv1a& add(std::int64_t v) {
    char buf[sizeof v];
    std::memcpy(buf, &v, sizeof v);
    return add(std::string_view(buf, sizeof buf));
  }

  std::uint64_t value() const { return value_; }

 private:
  std::uint64_t value_ = 0xcbf29ce484222325ULL;
};

}  // namespace acd
