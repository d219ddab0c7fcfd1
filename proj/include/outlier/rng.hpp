#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace outlier {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a tag, so that
/// per-class or per-round draws do not depend on iteration order.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer
  std::uint64_t z = base ^ (h + 0x9e3779b97f4a7c15ULL + (base << 6) + (base >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return derive_seed(base, std::to_string(tag));
}

}  // namespace outlier
