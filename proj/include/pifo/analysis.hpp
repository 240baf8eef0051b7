#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pifo/instances.hpp"
#include "pifo/solvers.hpp"

namespace pifo {

// Success probabilities q_1..q_K of independent geometric variables whose sum
// models the subspace stopping time T_K.
struct GeoSumModel {
  Vec probs;

  // q_l = p_{l'} with l' = l (mod n), built from a sampling scheme.
  static GeoSumModel from_scheme(const SamplingScheme& scheme, int upto_k);
};

struct TailReport {
  double threshold = 0.0;
  double empirical_prob = 0.0;
  std::int64_t trials = 0;
  double bound = 0.0;      // analytic lower bound the estimate is checked against
  double sigma_hat = 0.0;  // binomial standard error
};

// T_0 = 0, T_k = min{t : t > T_{k-1}, i_t = k (mod n)} over a recorded draw
// sequence (1-based step positions). Entries that never occur within the
// horizon are censored and reported as -1; later entries stay censored too.
std::vector<std::int64_t> stopping_times(const std::vector<int>& draws, int n,
                                         int upto_k);

// Exact P(X1 + X2 > j) for independent geometrics. Near-equal probabilities
// switch to the equal-case formula at the midpoint, since the unequal-case
// expression cancels catastrophically there.
double two_geo_tail(double p1, double p2, long long j);

// Exact P(sum_l Y_l > j) for any number of independent geometrics, by
// convolving the truncated mass functions. O(K j^2) — meant for the modest
// thresholds of certificate checks, not for bulk simulation.
double geo_sum_tail_exact(const GeoSumModel& model, long long j);

// Exact check of P(X1+X2 > j) >= P(Y1+Y2 > j) with Y ~ geo((p1+p2)/2).
bool averaging_dominance_check(double p1, double p2, long long j);

// Empirical P(sum Y_l > threshold) with per-trial derived seeds; the result
// does not depend on the number of worker threads.
TailReport geo_sum_tail_mc(const GeoSumModel& model, double threshold,
                           std::int64_t trials, std::uint64_t seed,
                           int jobs = 1);

// Simulates index draws only (no optimization) and measures the certificate
// tail: P(T_{M+1} > N) for subspace families, P(T > 1/(2 p1)) for the
// one-dimensional family.
TailReport certificate_tail_check(const HardInstance& inst,
                                  const SamplingScheme& scheme,
                                  std::int64_t trials, std::uint64_t seed,
                                  int jobs = 1);

struct FitRecord {
  double n = 0.0;
  double kappa = 0.0;
  double log_ratio = 0.0;  // log(Delta / eps)
  double queries = 0.0;
};

struct FitSummary {
  double a = 0.0;   // coefficient of n log(Delta/eps)
  double b = 0.0;   // coefficient of sqrt(n kappa) log(Delta/eps)
  double r2 = 0.0;
  int count = 0;
};

// Least-squares fit of queries against a n log(Delta/eps) +
// b sqrt(n kappa) log(Delta/eps).
FitSummary fit_complexity(const std::vector<FitRecord>& records);

std::string tail_report_json(const TailReport& report);
std::string fit_summary_json(const FitSummary& fit);

}  // namespace pifo
