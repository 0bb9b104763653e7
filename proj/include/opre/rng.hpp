#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace opre {

// Counter-based splittable random streams. The generator is SplitMix64
// (Steele/Lea/Flood mixing constants); every draw is a pure function of the
// 64-bit state, so dumps are reproducible across platforms and standard
// libraries. Do not swap in std::uniform_*_distribution here: its output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1], safe as argument of log
  double next_double_pos() { return 1.0 - next_double(); }

  bool next_bool() { return (next_u64() >> 63) != 0; }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection; exact uniformity.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double exponential(double rate) { return -std::log(next_double_pos()) / rate; }

 private:
  std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view s);

// Derived seed for (replication index, stream label) under a master seed.
// derive_seed(m, i, l) = mix(mix(m ^ fnv1a(l)) + golden * (i + 1)) where mix is
// the SplitMix64 finalizer; distinct indices under a fixed (master, label) can
// never collide because the finalizer is a bijection of the 64-bit ring.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view label);

}  // namespace opre
