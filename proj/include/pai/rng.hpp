#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace pai {

// All sampled data in the library comes from xoshiro256++ seeded through
// splitmix64. Both algorithms are fixed bit-for-bit, so a given seed yields
// the same points on every platform and compiler.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0,1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on [-1,1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  /// Uniform integer in [0,n). n must be nonzero.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Module-level streams are derived from the single user seed by fixed salts,
// so one --seed reproduces an entire run.
enum class Stream : std::uint64_t {
  zonotope = 0x5A01,
  kmeans = 0x5A02,
  gmm = 0x5A03,
  oracle = 0x5A04,
};

inline std::uint64_t derive_seed(std::uint64_t seed, Stream which) {
  return seed ^ (static_cast<std::uint64_t>(which) * 0xD6E8FEB86659FD93ULL);
}

inline Rng make_stream(std::uint64_t seed, Stream which) {
  return Rng(derive_seed(seed, which));
}

}  // namespace pai
