#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace fasc::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Hasher {
 public:
  explicit Hasher(std::uint64_t seed = 0x6a09e667f3bcc908ULL) : h_(seed) {}

  void add(std::uint64_t x) { h_ = splitmix64(h_ ^ splitmix64(x + counter_++)); }
  void add_signed(std::int64_t x) { add(static_cast<std::uint64_t>(x)); }

  // Rounds to the nearest multiple of `quantum`; values too large for an
  // int64 grid are hashed by bit pattern.
  void add_quantized(double v, double quantum) {
    const double scaled = v / quantum;
    if (std::abs(scaled) < 9.0e18) {
      add_signed(std::llround(scaled));
    } else {
      add(std::bit_cast<std::uint64_t>(v));
    }
  }

  std::uint64_t digest() const { return splitmix64(h_); }

 private:
  std::uint64_t h_;
  std::uint64_t counter_ = 0;
};

}  // namespace fasc::detail
