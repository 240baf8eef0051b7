#include "pifo/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pifo/errors.hpp"
#include "pifo/oracle.hpp"
#include "pifo/rng.hpp"

namespace pifo {

namespace {

double natural_scale(const HardInstance& inst) {
  if (inst.family == Family::NC) return inst.nc_beta;
  if (inst.family == Family::ONE_D) return std::max(1.0, inst.Bdist);
  return std::max(1.0, inst.xi);
}

// power iteration for the largest eigenvalue of v -> op(v)
template <typename Op>
double power_iteration(int dim, int iters, std::uint64_t seed, const Op& op) {
  Rng rng(seed);
  Vec v = rng.normal_vec(dim);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double nv = norm2(v);
    if (nv == 0.0) return 0.0;
    scale(v, 1.0 / nv);
    Vec w = op(v);
    lambda = dot(v, w);
    v = std::move(w);
  }
  return lambda;
}

}  // namespace

double smoothness_probe(const HardInstance& inst, int i, int iters,
                        std::uint64_t seed) {
  if (inst.family == Family::ONE_D) return inst.L;
  if (inst.family == Family::NC) {
    // gradient Lipschitz sampling
    Rng rng(derive_seed(seed, 17));
    const int dim = inst.dim();
    const double s = natural_scale(inst);
    double worst = 0.0;
    for (int p = 0; p < iters; ++p) {
      Vec x = rng.normal_vec(dim);
      Vec y = rng.normal_vec(dim);
      scale(x, s);
      scale(y, s);
      const Vec gx = component_gradient(inst, i, x);
      const Vec gy = component_gradient(inst, i, y);
      const double d = norm2(sub(x, y));
      if (d > 0.0) worst = std::max(worst, norm2(sub(gx, gy)) / d);
    }
    return worst;
  }
  const auto op = [&](const Vec& v) {
    Vec w = apply_group_gram(inst.band, inst.part, i, v);
    scale(w, 2.0 * inst.lambda1);
    axpy(2.0 * inst.lambda2, v, w);
    return w;
  };
  return power_iteration(inst.dim(), iters, seed, op);
}

double strong_convexity_probe(const HardInstance& inst, int i, int iters,
                              std::uint64_t seed) {
  if (inst.family == Family::ONE_D) return inst.L;
  if (inst.family == Family::NC)
    throw domain_error("strong convexity probe unsupported for nc family");
  // lambda_min(H) = c - lambda_max(cI - H) with c an upper bound on the
  // spectrum
  const double c = 4.0 * inst.lambda1 + 2.0 * inst.lambda2 + 1.0;
  const auto op = [&](const Vec& v) {
    Vec w = apply_group_gram(inst.band, inst.part, i, v);
    scale(w, -2.0 * inst.lambda1);
    axpy(c - 2.0 * inst.lambda2, v, w);
    return w;
  };
  return c - power_iteration(inst.dim(), iters, seed, op);
}

double group_gram_norm_probe(const BandSpec& band, const RowPartition& part,
                             int i, int iters, std::uint64_t seed) {
  const auto op = [&](const Vec& v) { return apply_group_gram(band, part, i, v); };
  return power_iteration(band.m, iters, seed, op);
}

double average_smoothness_probe(const HardInstance& inst, int pairs,
                                std::uint64_t seed) {
  Rng rng(derive_seed(seed, 23));
  const int dim = inst.dim();
  const double s = natural_scale(inst);
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    Vec x = rng.normal_vec(dim);
    Vec y = rng.normal_vec(dim);
    scale(x, s);
    scale(y, s);
    const double d2 = dot(sub(x, y), sub(x, y));
    if (d2 == 0.0) continue;
    double acc = 0.0;
    for (int i = 1; i <= inst.n; ++i) {
      const Vec g = sub(component_gradient(inst, i, x),
                        component_gradient(inst, i, y));
      acc += dot(g, g);
    }
    worst = std::max(worst, std::sqrt(acc / inst.n / d2));
  }
  return worst;
}

BracketCheck nc_bracket_check(const HardInstance& inst, int i, int pairs,
                              std::uint64_t seed) {
  if (inst.family != Family::NC)
    throw domain_error("bracket check applies to the nc family");
  Rng rng(derive_seed(seed, 31));
  const int dim = inst.dim();
  const double s = natural_scale(inst);
  BracketCheck out;
  out.worst_lower = out.worst_upper = std::numeric_limits<double>::infinity();
  double value_scale = 0.0;
  for (int p = 0; p < pairs; ++p) {
    Vec x = rng.normal_vec(dim);
    Vec y = rng.normal_vec(dim);
    scale(x, s);
    scale(y, s);
    const Vec d = sub(x, y);
    const double d2 = dot(d, d);
    const double gap = component_value(inst, i, x) - component_value(inst, i, y) -
                       dot(component_gradient(inst, i, y), d);
    value_scale = std::max({value_scale, std::abs(gap), inst.L * d2});
    out.worst_lower = std::min(out.worst_lower, gap + 0.5 * inst.sigma * d2);
    out.worst_upper = std::min(out.worst_upper, 0.5 * inst.L * d2 - gap);
  }
  const double slack = 1e-9 * (1.0 + value_scale);
  out.ok = out.worst_lower >= -slack && out.worst_upper >= -slack;
  return out;
}

}  // namespace pifo
