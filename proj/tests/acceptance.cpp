// Acceptance suite: every release-gating property, one per criterion, each
// printed as a single PASS/FAIL line. Expected values come from independent
// brute-force oracles (dense solves, exhaustive enumeration, Monte Carlo),
// never from the code paths under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "pifo/analysis.hpp"
#include "pifo/dense.hpp"
#include "pifo/instances.hpp"
#include "pifo/nonconvex.hpp"
#include "pifo/oracle.hpp"
#include "pifo/probes.hpp"
#include "pifo/rng.hpp"
#include "pifo/solvers.hpp"

using namespace pifo;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. closed-form minimizer fidelity on the strongly convex grid
Outcome criterion_minimizer_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_x = 0.0, worst_f = 0.0;
  int worst_m = 0;
  for (int n : {2, 5, 10}) {
    for (double kappa : {n / 2.0 + 1.0, 10.0 * n, 100.0 * n}) {
      const HardInstance inst = make_sc(kappa, 1.0, n, 1.0, 1e-4);
      if (inst.m > 64)
        return {false, "dimension exceeded 64 at kappa=" + num(kappa)};
      const auto [xstar, fstar] = minimizer(inst);
      const Vec ref = dense::dense_minimizer(inst);
      worst_x = std::max(worst_x, norm2(sub(xstar, ref)) / norm2(ref));
      worst_f = std::max(worst_f, std::abs(full_value(inst, xstar) + inst.Delta) /
                                      inst.Delta);
      worst_m = std::max(worst_m, inst.m);
    }
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst_x <= 1e-9 && worst_f <= 1e-9 && elapsed < 2.0;
  return {ok, "minimizer err " + num(worst_x) + ", value err " + num(worst_f) +
                  ", max m " + num(worst_m) + ", " + num(elapsed) + " s"};
}

// ---------------------------------------------------------------------------
// 2. restricted-gap closed forms against dense restricted solves
Outcome criterion_restricted_gaps() {
  double worst = 0.0;
  {
    const HardInstance inst = make_sc(40.0, 1.0, 5, 1.0, 1e-4);
    const double fstar = full_value(inst, dense::dense_minimizer(inst));
    for (int k : {1, inst.m / 2, inst.m - 1}) {
      const double dense_gap =
          full_value(inst, dense::dense_restricted_minimizer(inst, k)) - fstar;
      const double closed = inst.Delta * std::pow(inst.q, 2 * k) *
                            (1.0 + inst.q) /
                            (1.0 + std::pow(inst.q, 2 * k + 1));
      worst = std::max(worst, std::abs(closed - dense_gap) / dense_gap);
      worst = std::max(
          worst, std::abs(restricted_gap(inst, k) - closed) / closed);
      if (closed < inst.Delta * std::pow(inst.q, 2 * k))
        return {false, "gap fell below Delta q^{2k} at depth " + num(k)};
    }
  }
  {
    const HardInstance inst = make_c(10.0, 1.0, 4, 1e-3);
    const double fstar = full_value(inst, dense::dense_minimizer(inst));
    for (int k : {1, inst.m / 2, inst.m - 1}) {
      const double dense_gap =
          full_value(inst, dense::dense_restricted_minimizer(inst, k)) - fstar;
      const double closed = inst.xi * inst.xi * (inst.m - k) / (inst.n * inst.L);
      worst = std::max(worst, std::abs(closed - dense_gap) / dense_gap);
      worst = std::max(
          worst, std::abs(restricted_gap(inst, k) - closed) / closed);
    }
  }
  return {worst <= 1e-9, "worst relative error " + num(worst)};
}

// ---------------------------------------------------------------------------
// 3. span-jump exactness over randomized oracle-call sequences
Outcome criterion_span_jump() {
  const std::vector<HardInstance> families = {
      make_sc(10.0, 1.0, 4, 1.0, 1e-4),    make_c(10.0, 1.0, 4, 1e-3),
      make_avg_sc(20.0, 1.0, 4, 1.0, 1e-4), make_avg_c(10.0, 1.0, 4, 1e-3),
      make_nc(100.0, 50.0, 4, 10.0, 5e-3)};
  long long violations = 0;
  double worst = 0.0;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const HardInstance& inst = families[f];
    Rng rng(derive_seed(2024, 100 + f));
    const double glimit = prox_gamma_limit(inst);
    for (int seq = 0; seq < 1000; ++seq) {
      Vec x(inst.dim(), 0.0);
      int depth = 0;
      const int steps = 2 + static_cast<int>(rng.u01() * 6);
      for (int s = 0; s < steps; ++s) {
        const int i = rng.index1(inst.n);
        const double gamma =
            std::isfinite(glimit) ? rng.log_uniform(1e-4 * glimit, 0.99 * glimit)
                                  : rng.log_uniform(1e-3 / inst.L, 1e3 / inst.L);
        const OracleReply r = pifo_call(inst, i, x, gamma);
        const int next = (depth < inst.dim() && i == extender_component(inst, depth))
                             ? depth + 1
                             : depth;
        const double sg = norm_inf(r.gradient);
        const double sp = norm_inf(r.prox_point);
        for (int j = 0; j < inst.dim(); ++j) {
          const bool inside = inst.orient == Orientation::tail
                                  ? j >= inst.dim() - next
                                  : j < next;
          if (inside) continue;
          if (std::abs(r.gradient[j]) > 1e-12 * (1.0 + sg) ||
              std::abs(r.prox_point[j]) > 1e-12 * (1.0 + sp)) {
            ++violations;
            worst = std::max(worst, std::abs(r.gradient[j]));
            worst = std::max(worst, std::abs(r.prox_point[j]));
          }
        }
        Vec nx = r.prox_point;
        axpy(rng.uniform(-1.0, 1.0), r.gradient, nx);
        axpy(rng.uniform(-1.0, 1.0), x, nx);
        const double nn = norm_inf(nx);
        if (nn > 1e3) scale(nx, 1.0 / nn);
        x = std::move(nx);
        depth = next;
      }
    }
  }
  return {violations == 0,
          violations == 0
              ? "0 violations over 5000 randomized call sequences"
              : num(violations) + " violations, worst leak " + num(worst)};
}

// ---------------------------------------------------------------------------
// 4. prox correctness: dense-solve agreement and stationarity residuals
Outcome criterion_prox_correctness() {
  double worst_dense = 0.0, worst_stat = 0.0;
  const std::vector<HardInstance> families = {
      make_sc(10.0, 1.0, 4, 1.0, 1e-4),    make_c(10.0, 1.0, 4, 1e-3),
      make_avg_sc(20.0, 1.0, 4, 1.0, 1e-4), make_avg_c(10.0, 1.0, 4, 1e-3),
      make_one_d(10.0, 1.0, 4),            make_nc(100.0, 50.0, 4, 10.0, 5e-3)};
  for (std::size_t f = 0; f < families.size(); ++f) {
    const HardInstance& inst = families[f];
    Rng rng(derive_seed(77, f));
    const double glimit = prox_gamma_limit(inst);
    for (int rep = 0; rep < 500; ++rep) {
      Vec x = rng.normal_vec(inst.dim());
      if (inst.family == Family::NC)
        scale(x, inst.nc_beta * rng.log_uniform(0.1, 10.0));
      const int i = rng.index1(inst.n);
      const double gamma =
          std::isfinite(glimit) ? rng.log_uniform(1e-4 * glimit, 0.99 * glimit)
                                : rng.log_uniform(1e-3 / inst.L, 1e3 / inst.L);
      const Vec u = component_prox(inst, i, x, gamma);
      if (inst.is_quadratic()) {
        const Vec ref = dense::dense_component_prox(inst, i, x, gamma);
        worst_dense =
            std::max(worst_dense, norm2(sub(u, ref)) / (1.0 + norm2(ref)));
      }
      Vec resid = component_gradient(inst, i, u);
      for (int j = 0; j < inst.dim(); ++j) resid[j] += (u[j] - x[j]) / gamma;
      worst_stat =
          std::max(worst_stat, norm2(resid) / (1.0 + norm2(x) / gamma));
    }
  }
  const bool ok = worst_dense <= 1e-10 && worst_stat <= 1e-10;
  return {ok, "dense err " + num(worst_dense) + ", stationarity " +
                  num(worst_stat) + " over 500 draws per family"};
}

// ---------------------------------------------------------------------------
// 5. geometric sum tail floor 1 - 16/(9K)
Outcome criterion_geo_tail() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_margin = 1e300;
  for (int k : {8, 16, 32}) {
    for (int n : {4, 8}) {
      GeoSumModel model;
      model.probs.assign(k, 1.0 / n);
      double sum = 0.0;
      for (double q : model.probs) sum += q;
      const double threshold = k * k / (4.0 * sum);
      const TailReport t =
          geo_sum_tail_mc(model, threshold, 100000, derive_seed(5, k * 10 + n), 2);
      worst_margin = std::min(
          worst_margin, t.empirical_prob - (t.bound - 3.0 * t.sigma_hat));
    }
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst_margin >= 0.0 && elapsed < 30.0;
  return {ok, "worst margin above floor " + num(worst_margin) + ", " +
                  num(elapsed) + " s for 6 configs x 1e5 trials"};
}

// ---------------------------------------------------------------------------
// 6. certificate tails: P(T_{M+1} > N) >= 1/9 and the one-dimensional case
Outcome criterion_certificate_tail() {
  const HardInstance sc = make_sc(40.0, 1.0, 4, 1.0, 1e-4);
  const SamplingScheme uni = SamplingScheme::uniform(4, 11);
  const TailReport t = certificate_tail_check(sc, uni, 10000, 303, 2);
  const double floor_sc = 1.0 / 9.0 - 3.0 * t.sigma_hat;
  if (t.empirical_prob < floor_sc)
    return {false, "subspace tail " + num(t.empirical_prob) + " fell below " +
                       num(floor_sc)};
  const HardInstance od = make_one_d(10.0, 1.0, 4);
  const TailReport t1 = certificate_tail_check(od, uni, 10000, 304, 2);
  const double floor_od = 0.5 - 3.0 * t1.sigma_hat;
  const bool ok = t1.empirical_prob >= floor_od;
  return {ok, "P(T_{M+1}>N) = " + num(t.empirical_prob) + " (floor " +
                  num(floor_sc) + "), one-d " + num(t1.empirical_prob) +
                  " (floor " + num(floor_od) + ")"};
}

// ---------------------------------------------------------------------------
// 7. exact two-geometric formulas against exhaustive enumeration
Outcome criterion_two_geo_exact() {
  double worst = 0.0;
  for (int a = 1; a <= 19; ++a) {
    for (int b = 1; b <= 19; ++b) {
      const double p1 = 0.05 * a, p2 = 0.05 * b;
      for (long long j = 1; j <= 30; ++j) {
        // enumerate P(X1 + X2 <= j) exactly; the geometric tail beyond any
        // truncation point carries zero mass for the complement sum
        double below = 0.0;
        double pa = p1;
        for (long long l = 1; l <= j - 1; ++l) {
          below += pa * (1.0 - std::pow(1.0 - p2, double(j - l)));
          pa *= 1.0 - p1;
        }
        worst = std::max(worst,
                         std::abs(two_geo_tail(p1, p2, j) - (1.0 - below)));
      }
    }
  }
  if (worst > 1e-10) return {false, "enumeration mismatch " + num(worst)};
  for (int a = 1; a <= 19; ++a)
    for (int b = a; b <= 19; ++b)
      for (long long j = 1; j <= 30; ++j)
        if (!averaging_dominance_check(0.05 * a, 0.05 * b, j))
          return {false, "averaging dominance violated at (" + num(0.05 * a) +
                             ", " + num(0.05 * b) + ", " + num(double(j)) + ")"};
  return {true, "enumeration err " + num(worst) +
                    "; dominance held on the full sweep"};
}

// ---------------------------------------------------------------------------
// 8. declared constants: smoothness, strong convexity, average smoothness,
//    and the nonconvex bracket
Outcome criterion_constants() {
  double worst_smooth = -1e300, worst_strong = -1e300, worst_avg = -1e300;
  for (const HardInstance& inst :
       {make_sc(10.0, 1.0, 4, 1.0, 1e-4), make_c(10.0, 1.0, 4, 1e-3),
        make_avg_sc(20.0, 1.0, 4, 1.0, 1e-4), make_avg_c(10.0, 1.0, 4, 1e-3)}) {
    for (int i = 1; i <= inst.n; ++i) {
      worst_smooth = std::max(
          worst_smooth, smoothness_probe(inst, i, 400, 99) - inst.L);
      if (inst.mu > 0.0)
        worst_strong = std::max(
            worst_strong, inst.mu - strong_convexity_probe(inst, i, 400, 99));
    }
    if (inst.Lavg > 0.0)
      worst_avg = std::max(
          worst_avg, average_smoothness_probe(inst, 1000, 99) - inst.Lavg);
  }
  if (worst_smooth > 1e-8) return {false, "smoothness excess " + num(worst_smooth)};
  if (worst_strong > 1e-8)
    return {false, "strong convexity deficit " + num(worst_strong)};
  if (worst_avg > 0.0)
    return {false, "average smoothness excess " + num(worst_avg)};
  const HardInstance nc = make_nc(100.0, 50.0, 4, 10.0, 5e-3);
  for (int i = 1; i <= nc.n; ++i) {
    const BracketCheck br = nc_bracket_check(nc, i, 1000, 99);
    if (!br.ok)
      return {false, "(-sigma, L) bracket violated on component " + num(i)};
  }
  return {true, "smoothness excess " + num(worst_smooth) +
                    ", strong-convexity deficit " + num(worst_strong) +
                    ", avg-smoothness excess " + num(worst_avg) +
                    ", bracket held on 1000 pairs x 4 components"};
}

// ---------------------------------------------------------------------------
// 9. nonconvex gradient floor and initial-gap bound
Outcome criterion_nonconvex_floor() {
  const HardInstance inst = make_nc(100.0, 50.0, 4, 10.0, 5e-3);
  const double floor = std::pow(inst.nc_alpha, 0.75) * inst.nc_lambda /
                       (4.0 * inst.nc_beta);
  Rng rng(derive_seed(4242, 9));
  double min_grad = 1e300;
  for (int rep = 0; rep < 100; ++rep) {
    Vec x = rng.normal_vec(inst.dim());
    scale(x, inst.nc_beta * rng.log_uniform(0.2, 5.0));
    x[inst.m - 1] = 0.0;  // coordinates m and m+1 vanish
    x[inst.m] = 0.0;
    min_grad = std::min(min_grad, norm2(full_gradient(inst, x)));
  }
  if (min_grad < floor * (1.0 - 1e-9))
    return {false, "gradient " + num(min_grad) + " below floor " + num(floor)};
  // a plain descent run can recover at most the certified initial gap
  const double bound = inst.nc_lambda * (std::sqrt(inst.nc_alpha) / 2.0 +
                                         10.0 * inst.nc_alpha * inst.m);
  Vec x(inst.dim(), 0.0);
  const double f0 = full_value(inst, x);
  const double lf = inst.nc_lambda * (4.0 + 180.0 * inst.nc_alpha) /
                    (inst.nc_beta * inst.nc_beta);
  for (int it = 0; it < 6000; ++it) axpy(-1.0 / lf, full_gradient(inst, x), x);
  const double achieved = f0 - full_value(inst, x);
  const bool ok = achieved > 0.0 && achieved <= bound * (1.0 + 1e-9);
  return {ok, "min grad " + num(min_grad) + " >= floor " + num(floor) +
                  "; descent recovered " + num(achieved) + " <= bound " +
                  num(bound)};
}

// ---------------------------------------------------------------------------
// 10. upper-bound consistency: point saga sweep, two-term law fit, and the
//     certificate floor cross-check on every run
Outcome criterion_point_saga_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  const double delta = 1.0, mu = 1.0;
  const double eps_ratio = 1e-6;
  std::vector<FitRecord> records;
  long long floor_checks = 0;
  for (int n : {4, 16, 64}) {
    for (double mult : {2.0, 8.0, 32.0}) {
      const double kappa = mult * n;
      const double eps = eps_ratio * delta;
      const HardInstance inst = make_sc(kappa * mu, mu, n, delta, eps);
      const Certificate cert = certificate(inst, eps);
      const double scale_q = (n + std::sqrt(n * kappa)) * std::log(1.0 / eps_ratio);
      const std::int64_t budget =
          std::max<std::int64_t>(20000, static_cast<std::int64_t>(60.0 * scale_q));
      std::vector<double> qs;
      for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const SamplingScheme scheme = SamplingScheme::uniform(n, 17);
        AlgorithmSpec algo;
        algo.name = "point_saga";
        const RunTrace tr = run(inst, algo, scheme, budget, seed, eps, true, 5000);
        if (tr.queries_to_target < 0)
          return {false, "run censored at n=" + num(n) + " kappa=" + num(kappa)};
        qs.push_back(static_cast<double>(tr.queries_to_target));
        // lower-bound cross-check: if this run's stopping time T_{M+1}
        // exceeded N, it cannot have reached eps within N queries
        const auto times = stopping_times(tr.draws, n, cert.M + 1);
        const std::int64_t t_cert = times[cert.M];
        if (t_cert < 0 || t_cert > cert.N) {
          ++floor_checks;
          if (tr.queries_to_target <= cert.N)
            return {false, "run reached eps within the certified budget N"};
        }
      }
      std::sort(qs.begin(), qs.end());
      records.push_back({static_cast<double>(n), kappa,
                         std::log(1.0 / eps_ratio), qs[qs.size() / 2]});
    }
  }
  const FitSummary fit = fit_complexity(records);
  const double elapsed = seconds_since(t0);
  const bool ok = fit.r2 >= 0.9 && elapsed < 600.0;
  return {ok, "fit r2 = " + num(fit.r2) + " (a=" + num(fit.a) +
                  ", b=" + num(fit.b) + "), floor checks on " +
                  num(double(floor_checks)) + " runs, " + num(elapsed) + " s"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> fn;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "closed-form minimizer fidelity", criterion_minimizer_fidelity},
      {2, "restricted-gap formulas", criterion_restricted_gaps},
      {3, "span-jump exactness", criterion_span_jump},
      {4, "prox correctness", criterion_prox_correctness},
      {5, "geometric tail bound", criterion_geo_tail},
      {6, "certificate tail", criterion_certificate_tail},
      {7, "exact two-geometric formulas", criterion_two_geo_exact},
      {8, "declared constants", criterion_constants},
      {9, "nonconvex floor", criterion_nonconvex_floor},
      {10, "empirical upper-bound consistency", criterion_point_saga_sweep},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  int failures = 0;
  for (const Criterion& c : criteria()) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end())
      continue;
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s — %s\n", out.passed ? "PASS" : "FAIL",
                c.id, c.name, out.detail.c_str());
    std::fflush(stdout);
    if (!out.passed) ++failures;
  }
  return failures;
}
