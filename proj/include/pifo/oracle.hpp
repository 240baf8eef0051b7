#pragma once

#include <cstdint>

#include "pifo/instances.hpp"
#include "pifo/vec.hpp"

namespace pifo {

// One proximal incremental first-order oracle reply: component value,
// component gradient and proximal point at the queried gamma.
struct OracleReply {
  double value = 0.0;
  Vec gradient;
  Vec prox_point;
  double gamma = 0.0;
};

// Per-run query tally. The lower bounds are statements about oracle query
// counts, so every pifo_call bumps exactly one of these.
class QueryCounter {
 public:
  void bump() { ++count_; }
  std::int64_t count() const { return count_; }

 private:
  std::int64_t count_ = 0;
};

double component_value(const HardInstance& inst, int i, const Vec& x);
Vec component_gradient(const HardInstance& inst, int i, const Vec& x);

// argmin_u f_i(u) + ||u - x||^2 / (2 gamma). Exact linear solve for the
// quadratic families; per-block safeguarded Newton for NC. For NC, gamma
// must stay strictly below prox_gamma_limit(inst); boundary calls fail
// closed with a 1e-12 relative slack.
Vec component_prox(const HardInstance& inst, int i, const Vec& x, double gamma);

OracleReply pifo_call(const HardInstance& inst, int i, const Vec& x,
                      double gamma, QueryCounter* counter = nullptr);

// Averages over components. Reporting and certificates only; never handed to
// algorithms as an oracle.
double full_value(const HardInstance& inst, const Vec& x);
Vec full_gradient(const HardInstance& inst, const Vec& x);

}  // namespace pifo
