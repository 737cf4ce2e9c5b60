#pragma once

#include <cstdint>
#include <limits>

namespace randcrn {

inline constexpr const char* kRngId = "splitmix64+libstdc++-binomial";

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

inline constexpr std::uint64_t hash64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return hash64(hash64(a, b), c);
}

// Counter-based 64-bit generator: the k-th output is mix64(seed + k * gamma).
// Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) without modulo bias (Lemire).
  std::uint64_t below(std::uint64_t bound) {
    using u128 = unsigned __int128;
    u128 m = static_cast<u128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

// Substream for trial t of a run seeded with master.
inline SplitMix64 trial_stream(std::uint64_t master, std::uint64_t trial) {
  return SplitMix64(hash64(master, trial));
}

// Stateless uniform in [0,1) keyed by a tuple; used by coupled sampling.
inline constexpr double keyed_uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return static_cast<double>(hash64(a, b, c) >> 11) * 0x1.0p-53;
}

}  // namespace randcrn
