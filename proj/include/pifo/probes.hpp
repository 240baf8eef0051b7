#pragma once

#include <cstdint>

#include "pifo/instances.hpp"

namespace pifo {

// Numerical probes of the declared constants. Power iteration is used on the
// exact Hessian operators of the quadratic families; the nonconvex family is
// probed by sampling because its Hessian varies with x.

// Largest Hessian eigenvalue of component i (power iteration for quadratic
// families, gradient-Lipschitz sampling for NC, exact for ONE_D).
double smoothness_probe(const HardInstance& inst, int i, int iters,
                        std::uint64_t seed);

// Smallest Hessian eigenvalue of component i via shifted power iteration
// (quadratic families and ONE_D only).
double strong_convexity_probe(const HardInstance& inst, int i, int iters,
                              std::uint64_t seed);

// Spectral norm of B_i^T B_i.
double group_gram_norm_probe(const BandSpec& band, const RowPartition& part,
                             int i, int iters, std::uint64_t seed);

// max over random pairs of sqrt((1/n) sum_i ||grad f_i(x) - grad f_i(y)||^2)
// / ||x - y||.
double average_smoothness_probe(const HardInstance& inst, int pairs,
                                std::uint64_t seed);

// Bregman-gap bracket check for (-sigma, L)-smoothness over random pairs.
struct BracketCheck {
  double worst_lower = 0.0;  // min over pairs of gap - (-sigma/2)||x-y||^2
  double worst_upper = 0.0;  // min over pairs of (L/2)||x-y||^2 - gap
  bool ok = false;
};
BracketCheck nc_bracket_check(const HardInstance& inst, int i, int pairs,
                              std::uint64_t seed);

}  // namespace pifo
