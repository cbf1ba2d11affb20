#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sklab {

// Counter-based task seeding: every parallel task derives its own stream from
// (master seed, kind tag, index), so results do not depend on worker count.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view kind,
                                 std::uint64_t index) {
  return splitmix64(splitmix64(master ^ fnv1a64(kind)) ^ index);
}

inline std::mt19937_64 substream(std::uint64_t master, std::string_view kind,
                                 std::uint64_t index) {
  return std::mt19937_64(derive_seed(master, kind, index));
}

// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley step), accurate to ~1e-15. Used for quantile-coupled disorder draws.
double normal_quantile(double p);

}  // namespace sklab
