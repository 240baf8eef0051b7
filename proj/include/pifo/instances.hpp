#pragma once

#include <string>
#include <utility>

#include "pifo/band.hpp"
#include "pifo/vec.hpp"

namespace pifo {

enum class Family { SC, C, AVG_SC, AVG_C, ONE_D, NC };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// Query budget certificate: M is the deepest subspace whose restricted
// optimality gap (gradient-norm floor for NC) still exceeds 9*eps, and
// N = floor(n(M+1)/4) is the query count below which the expected
// suboptimality cannot drop under eps.
struct Certificate {
  int M = 0;
  long long N = 0;
  double gap_at_M = 0.0;
};

// A fully parameterized adversarial finite-sum instance. Immutable after
// construction; all derived scalars are stored once here and never
// recomputed at call sites.
struct HardInstance {
  Family family = Family::SC;
  BandSpec band;        // band.m equals dim(); unused for ONE_D
  RowPartition part;
  Orientation orient = Orientation::tail;

  int n = 0;  // number of components
  int m = 0;  // chain length; ambient dimension is m (m+1 for NC, 1 for ONE_D)

  double L = 0.0;      // per-component smoothness
  double mu = 0.0;     // strong convexity (0 when absent)
  double Lavg = 0.0;   // average-smoothness target (AVG families)
  double Delta = 0.0;  // initial objective gap
  double Bdist = 0.0;  // initial distance bound
  double eps = 0.0;    // target accuracy the sizing was done for

  double lambda0 = 0.0;  // linear coefficient
  double lambda1 = 0.0;  // quadratic row coefficient
  double lambda2 = 0.0;  // diagonal coefficient
  double omega = 0.0;

  double alpha = 0.0;  // SC conditioning root
  double q = 0.0;      // SC decay rate, (alpha-1)/(alpha+1)
  double xi = 0.0;     // minimizer scale

  double sigma = 0.0;      // NC lower smoothness
  double nc_alpha = 0.0;   // NC scalings
  double nc_lambda = 0.0;
  double nc_beta = 0.0;

  int dim() const;
  bool is_quadratic() const;  // SC, C and AVG variants
};

// L-smooth, mu-strongly convex components; requires L/mu >= n/2 + 1 and
// eps/Delta <= (1/9)((sqrt2-1)/(sqrt2+1))^2.
HardInstance make_sc(double L, double mu, int n, double Delta, double eps);

// L-smooth convex components; requires eps <= B^2 L / (384 n). Above that
// threshold the one-dimensional family is the right instance.
HardInstance make_c(double L, double Bdist, int n, double eps);

// L-average-smooth family with strongly convex mean; delegates to the SC
// construction with L = sqrt(n(Lavg^2 - mu^2)/2 - mu^2).
HardInstance make_avg_sc(double Lavg, double mu, int n, double Delta,
                         double eps);

// L-average-smooth family with convex mean; delegates to the C construction
// with L = sqrt(n/2) * Lavg.
HardInstance make_avg_c(double Lavg, double Bdist, int n, double eps);

// One-dimensional instance: component 1 is (L/2)x^2 - nLBx, the rest are
// (L/2)x^2. Hard only until component 1 is drawn.
HardInstance make_one_d(double L, double Bdist, int n);

// Nonconvex (-sigma, L)-smooth components on R^{m+1}, head orientation.
HardInstance make_nc(double L, double sigma, int n, double Delta, double eps);

// Closed-form global minimizer and value. Unsupported for NC, whose minimum
// is only bounded.
std::pair<Vec, double> minimizer(const HardInstance& inst);

// min over the k-dimensional oriented subspace, in closed form.
double restricted_min(const HardInstance& inst, int k);

// restricted_min(inst, k) - f*.
double restricted_gap(const HardInstance& inst, int k);

// min over the k-dimensional subspace of ||x - x*||^2 (SC families only).
double restricted_min_distance(const HardInstance& inst, int k);

Certificate certificate(const HardInstance& inst, double eps);

// Component whose oracle can extend the reachable subspace from depth k to
// depth k+1; every other component keeps depth-k points at depth k.
int extender_component(const HardInstance& inst, int k);

// Strict upper bound on valid prox gamma. Unbounded (infinity) for the
// convex families; finite for NC.
double prox_gamma_limit(const HardInstance& inst);

// Serialization. Scalars are written as hex-float strings so a round trip
// reproduces bit-identical doubles.
std::string instance_to_json(const HardInstance& inst);
HardInstance instance_from_json(const std::string& text);

}  // namespace pifo
