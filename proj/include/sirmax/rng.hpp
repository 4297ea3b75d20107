#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace sirmax {

// Random stream with explicit derivation: stream(master, index) is a pure
// function of its arguments, so work items can be farmed out to any number
// of threads and still consume identical randomness per item.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(mix(master ^ mix(index + 0xD1B54A32D192ED03ULL)));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform() < p; }

  // Uniform in [0, bound); bound > 0.
  std::uint32_t below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // First round >= 1 at which a Bernoulli(p) sequence succeeds, by inverse
  // transform.  Returns +inf when p == 0.  Returned as double so tiny p
  // cannot overflow an integer round counter.
  double first_success(double p) {
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    if (p >= 1.0) return 1.0;
    return 1.0 + std::floor(std::log1p(-uniform()) / std::log1p(-p));
  }

  // Same, but rounds beyond `cap` collapse into the single value cap + 1.
  std::uint32_t first_success_capped(double p, std::uint32_t cap) {
    if (p <= 0.0) return cap + 1;
    if (p >= 1.0) return 1;  // equals cap + 1 when cap == 0, as it should
    double r = std::log1p(-uniform()) / std::log1p(-p);
    if (!(r < static_cast<double>(cap))) return cap + 1;
    return static_cast<std::uint32_t>(r) + 1;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sirmax
