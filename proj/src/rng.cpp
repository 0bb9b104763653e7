#include "opre/rng.hpp"

namespace opre {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

namespace {
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view label) {
  std::uint64_t base = mix64(master ^ fnv1a64(label));
  return mix64(base + 0x9E3779B97F4A7C15ull * (index + 1));
}

}  // namespace opre
