#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

// All randomness in the project flows from one base seed through named
// substreams: substream(base, "positions", n), substream(base, "noise", k), ...
// Two substreams with different names or indices are statistically
// independent; the derivation is pure so campaigns are reproducible.

namespace awia::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic substream seed from (base, name, index).
inline std::uint64_t substream_seed(std::uint64_t base, std::string_view name,
                                    std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(base ^ fnv1a(name));
  return splitmix64(s ^ splitmix64(index));
}

inline std::mt19937_64 make_engine(std::uint64_t base, std::string_view name,
                                   std::uint64_t index = 0) {
  std::uint64_t s = substream_seed(base, name, index);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s) >> 32)};
  return std::mt19937_64(seq);
}

// Hand-rolled draw helpers: the std:: distributions are implementation
// defined, these keep sampled values identical for a given engine state.

// uniform in [0, 1)
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// standard normal (Box-Muller, one value per call, no cached state)
inline double normal01(std::mt19937_64& eng) {
  double u1 = uniform01(eng);
  while (u1 <= 0.0) u1 = uniform01(eng);
  double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace awia::rng
