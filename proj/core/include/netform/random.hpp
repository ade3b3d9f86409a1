#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

// Deterministic randomness utilities. Everything the simulator draws goes
// through either a sequential Stream (seeded per subsystem) or a stateless
// event hash keyed by (seed, time, ids). The event hash is what keeps
// environment realizations identical across strategies run on the same seed:
// link fates and node displacements depend only on the keys, never on the
// order in which a strategy happens to query them.

namespace netform::rng {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix_next(std::uint64_t& state) {
  state += kGamma;
  return mix64(state);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
  return mix64(a + kGamma + mix64(b + kGamma));
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return hash2(hash2(a, b), c);
}

inline std::uint64_t hash4(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
  return hash2(hash3(a, b, c), d);
}

inline double to_unit_double(std::uint64_t u) {
  return static_cast<double>(u >> 11) * 0x1.0p-53;  // [0, 1)
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(mix64(seed + kGamma)) {}

  std::uint64_t u64() { return splitmix_next(state_); }

  double uniform() { return to_unit_double(u64()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  std::uint32_t below(std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("Stream::below: n must be > 0");
    const std::uint64_t limit = ~0ull - ~0ull % n;
    std::uint64_t u;
    do {
      u = u64();
    } while (u >= limit);
    return static_cast<std::uint32_t>(u % n);
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Exact inversion by sequential search; fine for the means used here
  // (mean <= a few hundred keeps exp(-mean) above double underflow).
  int poisson(double mean) {
    if (mean < 0) throw std::invalid_argument("Stream::poisson: mean < 0");
    if (mean == 0) return 0;
    const double u = uniform();
    double p = std::exp(-mean);
    double cum = p;
    int k = 0;
    while (u > cum && k < 100000) {
      ++k;
      p *= mean / k;
      cum += p;
    }
    return k;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stateless per-event draws.
inline double event_uniform(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b, std::uint64_t c) {
  return to_unit_double(hash4(seed, a, b, c));
}

inline double event_gaussian(std::uint64_t seed, std::uint64_t a,
                             std::uint64_t b, std::uint64_t c) {
  const double u1 = 1.0 - to_unit_double(hash4(seed, a, b, c));
  const double u2 = to_unit_double(hash4(seed ^ 0x5851f42d4c957f2dull, a, b, c));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace netform::rng
