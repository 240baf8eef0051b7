#pragma once

#include <cstdint>
#include <cmath>

#include "pifo/vec.hpp"

namespace pifo {

// SplitMix64 finalizer. Used both as the state transition of the stateful
// generator below and as a stateless hash for counter-based streams, so a
// draw at index t can be reproduced without replaying the stream.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless draw keyed by (seed, counter).
inline std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed ^ mix64(counter + 0x5851f42d4c957f2dULL));
}

inline double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double counter_u01(std::uint64_t seed, std::uint64_t counter) {
  return to_unit_interval(counter_u64(seed, counter));
}

// Derives an independent stream seed, e.g. one per Monte Carlo trial or per
// worker partition.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return counter_u64(seed ^ 0x6a09e667f3bcc909ULL, stream);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return mix64(state_++); }

  double u01() { return to_unit_interval(next_u64()); }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = u01();
    } while (u1 <= 0.0);
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vec normal_vec(std::size_t dim) {
    Vec v(dim);
    for (auto& x : v) x = normal();
    return v;
  }

  // integer in [1, n]
  int index1(int n) { return 1 + static_cast<int>(u01() * n) % n; }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pifo
