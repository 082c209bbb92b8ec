#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace synthqa {

/// Incremental 64-bit FNV-1a. Each field is followed by a 0xFF separator so
/// ("ab","c") and ("a","bc") hash differently.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view field) {
    for (unsigned char c : field) step(c);
    step(0xFF);
    return *this;
  }
  std::uint64_t value() const { return h_; }
  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = h_;
    for (int i = 15; i >= 0; --i, v >>= 4) out[i] = kDigits[v & 0xF];
    return out;
  }

 private:
  void step(unsigned char c) {
    h_ ^= c;
    h_ *= 1099511628211ull;
  }
  std::uint64_t h_ = 14695981039346656037ull;
};

}  // namespace synthqa
