#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace marl {

// splitmix64, used to derive named substream seeds from one run seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic RNG wrapper. All distributions are hand-rolled on top of the
// raw 64-bit stream so output does not depend on the standard library's
// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng substream(std::uint64_t seed, std::string_view name) {
    return Rng(splitmix64(seed ^ hash_name(name)));
  }
  static Rng substream(std::uint64_t seed, std::string_view name,
                       std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed ^ hash_name(name)) + index));
  }

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (no cached second sample).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n). Modulo bias is negligible for n << 2^64.
  std::uint64_t randint(std::uint64_t n) { return raw() % n; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace marl
