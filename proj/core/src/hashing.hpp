#pragma once

#include <cstddef>
#include <cstdint>

namespace fmo {

inline std::size_t mix(std::size_t seed, std::size_t value) {
  std::uint64_t x = static_cast<std::uint64_t>(seed) ^ (static_cast<std::uint64_t>(value) + 0x9e3779b97f4a7c15ull +
                                                       (static_cast<std::uint64_t>(seed) << 6) +
                                                       (static_cast<std::uint64_t>(seed) >> 2));
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return static_cast<std::size_t>(x);
}

}  // namespace fmo
