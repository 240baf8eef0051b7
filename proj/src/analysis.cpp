#include "pifo/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "pifo/errors.hpp"
#include "pifo/rng.hpp"

namespace pifo {

namespace {

void check_prob(double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw domain_error("geometric success probability must lie in (0, 1]");
}

// geometric draw (number of trials up to and including the first success)
std::int64_t geo_draw(Rng& rng, double p) {
  if (p >= 1.0) return 1;
  double u;
  do {
    u = rng.u01();
  } while (u == 0.0);
  return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

// deterministic multi-threaded Bernoulli mean: per-trial seeds make the
// result independent of the partitioning
template <typename Trial>
TailReport bernoulli_mc(std::int64_t trials, std::uint64_t seed, int jobs,
                        const Trial& trial) {
  if (trials < 1) throw domain_error("monte carlo requires trials >= 1");
  if (jobs < 1) jobs = 1;
  std::vector<std::int64_t> hits(jobs, 0);
  const auto worker = [&](int w) {
    std::int64_t h = 0;
    for (std::int64_t t = w; t < trials; t += jobs) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
      if (trial(rng)) ++h;
    }
    hits[w] = h;
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  std::int64_t total = 0;
  for (std::int64_t h : hits) total += h;
  TailReport report;
  report.trials = trials;
  report.empirical_prob = static_cast<double>(total) / trials;
  report.sigma_hat = std::sqrt(report.empirical_prob *
                               (1.0 - report.empirical_prob) / trials);
  return report;
}

}  // namespace

GeoSumModel GeoSumModel::from_scheme(const SamplingScheme& scheme, int upto_k) {
  if (upto_k < 1) throw domain_error("geometric sum needs at least one term");
  GeoSumModel model;
  const int n = static_cast<int>(scheme.probs.size());
  model.probs.reserve(upto_k);
  for (int l = 1; l <= upto_k; ++l) {
    const int lp = ((l - 1) % n) + 1;  // l' = l (mod n), 1-based
    model.probs.push_back(scheme.probs[lp - 1]);
  }
  return model;
}

std::vector<std::int64_t> stopping_times(const std::vector<int>& draws, int n,
                                         int upto_k) {
  if (n < 2) throw domain_error("stopping times require n >= 2");
  std::vector<std::int64_t> times(upto_k, -1);
  std::int64_t prev = 0;
  for (int k = 1; k <= upto_k; ++k) {
    const int want = ((k - 1) % n) + 1;  // component index with i = k (mod n)
    std::int64_t found = -1;
    for (std::int64_t t = prev; t < static_cast<std::int64_t>(draws.size());
         ++t) {
      if (draws[t] == want) {
        found = t + 1;  // steps are 1-based
        break;
      }
    }
    if (found < 0) break;  // censored from here on
    times[k - 1] = found;
    prev = found;
  }
  return times;
}

double two_geo_tail(double p1, double p2, long long j) {
  check_prob(p1);
  check_prob(p2);
  if (j < 1) throw domain_error("two_geo_tail requires j >= 1");
  if (j == 1) return 1.0;  // the sum of two geometrics is at least 2
  const double pmax = std::max(p1, p2);
  if (std::abs(p1 - p2) <= 1e-12 * pmax) {
    // equal-case formula at the midpoint; the general expression divides by
    // p2 - p1 and loses every significant digit here
    const double p = 0.5 * (p1 + p2);
    if (p >= 1.0) return 0.0;
    return (j * p / (1.0 - p) + 1.0) * std::pow(1.0 - p, static_cast<double>(j));
  }
  const double t1 = p2 * std::pow(1.0 - p1, static_cast<double>(j));
  const double t2 = p1 * std::pow(1.0 - p2, static_cast<double>(j));
  return (t1 - t2) / (p2 - p1);
}

double geo_sum_tail_exact(const GeoSumModel& model, long long j) {
  const int k = static_cast<int>(model.probs.size());
  if (k < 1) throw domain_error("empty geometric sum model");
  for (double q : model.probs) check_prob(q);
  if (j < k) return 1.0;  // the sum is at least K
  // mass[s] = P(Y_1 + ... + Y_l = s) for s <= j, built one variable at a time
  std::vector<double> mass(j + 1, 0.0);
  mass[0] = 1.0;
  for (int l = 0; l < k; ++l) {
    const double p = model.probs[l];
    std::vector<double> next(j + 1, 0.0);
    for (long long s = l; s <= j; ++s) {
      if (mass[s] == 0.0) continue;
      double add = mass[s] * p;  // P(Y = d) = p (1-p)^{d-1}
      for (long long d = 1; s + d <= j; ++d) {
        next[s + d] += add;
        add *= 1.0 - p;
      }
    }
    mass.swap(next);
  }
  double below = 0.0;
  for (long long s = k; s <= j; ++s) below += mass[s];
  return 1.0 - below;
}

bool averaging_dominance_check(double p1, double p2, long long j) {
  const double mid = 0.5 * (p1 + p2);
  const double lhs = two_geo_tail(p1, p2, j);
  const double rhs = two_geo_tail(mid, mid, j);
  return lhs >= rhs - 1e-12;
}

TailReport geo_sum_tail_mc(const GeoSumModel& model, double threshold,
                           std::int64_t trials, std::uint64_t seed, int jobs) {
  for (double q : model.probs) check_prob(q);
  if (model.probs.empty()) throw domain_error("empty geometric sum model");
  TailReport report = bernoulli_mc(trials, seed, jobs, [&](Rng& rng) {
    std::int64_t sum = 0;
    for (double q : model.probs) sum += geo_draw(rng, q);
    return static_cast<double>(sum) > threshold;
  });
  report.threshold = threshold;
  double psum = 0.0;
  for (double q : model.probs) psum += q;
  const double k = static_cast<double>(model.probs.size());
  report.bound = 1.0 - 16.0 / (9.0 * k);  // valid at threshold K^2/(4 sum q)
  return report;
}

TailReport certificate_tail_check(const HardInstance& inst,
                                  const SamplingScheme& scheme,
                                  std::int64_t trials, std::uint64_t seed,
                                  int jobs) {
  if (static_cast<int>(scheme.probs.size()) != inst.n)
    throw std::invalid_argument("sampling scheme size does not match instance");
  if (inst.family == Family::ONE_D) {
    // hard until component 1 is first drawn: P(T > 1/(2 p1)) >= 1/2
    const double p1 = scheme.probs.front();
    const double threshold = 1.0 / (2.0 * p1);
    TailReport report = bernoulli_mc(trials, seed, jobs, [&](Rng& rng) {
      std::int64_t t = geo_draw(rng, p1);
      return static_cast<double>(t) > threshold;
    });
    report.threshold = threshold;
    report.bound = 0.5;
    return report;
  }
  const Certificate cert = certificate(inst, inst.eps);
  const GeoSumModel model = GeoSumModel::from_scheme(scheme, cert.M + 1);
  TailReport report = bernoulli_mc(trials, seed, jobs, [&](Rng& rng) {
    std::int64_t sum = 0;
    for (double q : model.probs) sum += geo_draw(rng, q);
    return sum > cert.N;
  });
  report.threshold = static_cast<double>(cert.N);
  report.bound = 1.0 / 9.0;
  return report;
}

FitSummary fit_complexity(const std::vector<FitRecord>& records) {
  if (records.size() < 6)
    throw domain_error("complexity fit requires at least 6 records");
  // two-feature least squares via the normal equations
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
  double mean_y = 0.0;
  for (const FitRecord& r : records) {
    const double f1 = r.n * r.log_ratio;
    const double f2 = std::sqrt(r.n * r.kappa) * r.log_ratio;
    s11 += f1 * f1;
    s12 += f1 * f2;
    s22 += f2 * f2;
    b1 += f1 * r.queries;
    b2 += f2 * r.queries;
    mean_y += r.queries;
  }
  mean_y /= records.size();
  const double det = s11 * s22 - s12 * s12;
  const double scale = std::max(std::abs(s11), std::abs(s22));
  if (!(std::abs(det) > 1e-12 * scale * scale))
    throw domain_error(
        "degenerate design matrix: records must span both axes of the "
        "complexity law");
  FitSummary fit;
  fit.a = (s22 * b1 - s12 * b2) / det;
  fit.b = (s11 * b2 - s12 * b1) / det;
  fit.count = static_cast<int>(records.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const FitRecord& r : records) {
    const double pred = fit.a * r.n * r.log_ratio +
                        fit.b * std::sqrt(r.n * r.kappa) * r.log_ratio;
    ss_res += (r.queries - pred) * (r.queries - pred);
    ss_tot += (r.queries - mean_y) * (r.queries - mean_y);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::string tail_report_json(const TailReport& report) {
  nlohmann::json j;
  j["threshold"] = report.threshold;
  j["empirical_prob"] = report.empirical_prob;
  j["trials"] = report.trials;
  j["bound"] = report.bound;
  j["sigma_hat"] = report.sigma_hat;
  return j.dump(2);
}

std::string fit_summary_json(const FitSummary& fit) {
  nlohmann::json j;
  j["a_n_log"] = fit.a;
  j["b_sqrt_nk_log"] = fit.b;
  j["r2"] = fit.r2;
  j["records"] = fit.count;
  return j.dump(2);
}

}  // namespace pifo
