#include "pifo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "pifo/analysis.hpp"
#include "pifo/dense.hpp"
#include "pifo/errors.hpp"
#include "pifo/instances.hpp"
#include "pifo/nonconvex.hpp"
#include "pifo/oracle.hpp"
#include "pifo/probes.hpp"
#include "pifo/rng.hpp"
#include "pifo/solvers.hpp"

namespace pifo {

namespace {

struct Ctx {
  std::uint64_t seed;
  int jobs;
  std::vector<CheckResult>* out;

  void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    CheckResult r;
    r.name = name;
    try {
      auto [ok, detail] = fn();
      r.passed = ok;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    out->push_back(std::move(r));
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::pair<bool, std::string> bounded(double worst, double tol,
                                     const std::string& label) {
  return {worst <= tol, label + " = " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

std::int64_t draw_geometric(Rng& rng, double p) {
  if (p >= 1.0) return 1;
  double u;
  do {
    u = rng.u01();
  } while (u == 0.0);
  return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

// representative instances used across suites
HardInstance sample_sc() { return make_sc(10.0, 1.0, 4, 1.0, 1e-4); }
HardInstance sample_c() { return make_c(10.0, 1.0, 4, 1e-3); }
HardInstance sample_avg_sc() { return make_avg_sc(20.0, 1.0, 4, 1.0, 1e-4); }
HardInstance sample_avg_c() { return make_avg_c(10.0, 1.0, 4, 1e-3); }
HardInstance sample_one_d() { return make_one_d(10.0, 1.0, 4); }
HardInstance sample_nc() { return make_nc(100.0, 50.0, 4, 10.0, 5e-3); }

// ---------------------------------------------------------------- structure

void suite_structure(Ctx& ctx) {
  ctx.check("gram_matches_tridiagonal", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (int m : {2, 3, 5, 8, 13, 21, 34, 64}) {
      for (double omega : {0.0, 0.3, 1.0}) {
        const BandSpec spec{m, omega, 2};
        const dense::Mat b = dense::band_matrix(spec);
        const dense::Mat gram = dense::matmul(dense::transpose(b), b);
        worst = std::max(
            worst, dense::max_abs_diff(gram, dense::tridiag_gram_reference(m, omega)));
      }
    }
    return bounded(worst, 0.0, "entrywise gram error");
  });

  ctx.check("partition_is_congruence_partition", [&]() -> std::pair<bool, std::string> {
    for (int n : {2, 3, 5, 8, 61}) {
      for (int m : {2, 3, 7, 16, 61, 255, 256}) {
        if (m < n) continue;
        const BandSpec spec{m, 1.0, n};
        for (const RowPartition& part :
             {partition_rows(spec), partition_rows_head(spec)}) {
          std::vector<int> seen(m + 1, 0);
          for (int i = 1; i <= n; ++i) {
            const auto& g = part.groups[i - 1];
            for (std::size_t a = 0; a < g.size(); ++a) {
              seen[g[a]]++;
              if (a + 1 < g.size() && g[a + 1] - g[a] < n)
                return std::pair{false, "rows closer than n in one group"};
            }
          }
          for (int l = 1; l <= m; ++l)
            if (seen[l] != 1) return std::pair{false, "row not covered exactly once"};
        }
        const RowPartition tail = partition_rows(spec);
        for (int i = 1; i <= n; ++i)
          for (int l : tail.groups[i - 1])
            if ((l - (i - 1)) % n != 0)
              return std::pair{false, "congruence class mismatch"};
      }
    }
    return std::pair{true, std::string("partitions valid for all grid (m, n)")};
  });

  ctx.check("group_gram_apply_matches_dense", [&]() -> std::pair<bool, std::string> {
    Rng rng(derive_seed(ctx.seed, 1));
    double worst = 0.0;
    for (int m : {8, 13}) {
      for (int n : {3, 4}) {
        for (double omega : {0.3, 1.0}) {
          const BandSpec spec{m, omega, n};
          for (const RowPartition& part :
               {partition_rows(spec), partition_rows_head(spec)}) {
            for (int i = 1; i <= n; ++i) {
              const dense::Mat g = dense::group_gram(spec, part, i);
              for (int rep = 0; rep < 100; ++rep) {
                const Vec x = rng.normal_vec(m);
                const Vec got = apply_group_gram(spec, part, i, x);
                const Vec want = dense::matvec(g, x);
                worst = std::max(worst,
                                 norm2(sub(got, want)) / (1.0 + norm2(want)));
              }
            }
          }
        }
      }
    }
    return bounded(worst, 1e-10, "relative error vs dense apply");
  });

  ctx.check("shifted_solve_matches_dense_and_inverts", [&]() -> std::pair<bool, std::string> {
    Rng rng(derive_seed(ctx.seed, 2));
    double worst = 0.0;
    for (int m : {8, 13}) {
      for (int n : {3, 4}) {
        const BandSpec spec{m, 0.7, n};
        const RowPartition part = partition_rows(spec);
        for (int i = 1; i <= n; ++i) {
          const dense::Mat g = dense::group_gram(spec, part, i);
          for (int rep = 0; rep < 100; ++rep) {
            const double c2 = rng.log_uniform(1e-2, 1e2);
            const Vec y = rng.normal_vec(m);
            const Vec got = solve_shifted_group_gram(spec, part, i, c2, y);
            dense::Mat a = g;
            for (int r = 0; r < m; ++r) {
              for (int c = 0; c < m; ++c) a[r][c] *= c2;
              a[r][r] += 1.0;
            }
            const Vec want = dense::solve(a, y);
            worst = std::max(worst, norm2(sub(got, want)) / (1.0 + norm2(want)));
            // applying (I + c2 gram) must recover y
            Vec back = apply_group_gram(spec, part, i, got);
            scale(back, c2);
            axpy(1.0, got, back);
            worst = std::max(worst, norm2(sub(back, y)) / (1.0 + norm2(y)));
          }
        }
      }
    }
    return bounded(worst, 1e-10, "solve error");
  });

  ctx.check("group_gram_norm_at_most_2", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (int m : {4, 16, 64}) {
      for (int n : {2, 5}) {
        const BandSpec spec{m, 1.0, n};
        const RowPartition part = partition_rows(spec);
        for (int i = 1; i <= n; ++i)
          worst = std::max(worst, group_gram_norm_probe(spec, part, i, 300,
                                                        derive_seed(ctx.seed, 3)));
      }
    }
    return bounded(worst, 2.0 + 1e-9, "spectral norm");
  });

  ctx.check("subspace_index_cases", [&]() -> std::pair<bool, std::string> {
    const Vec zero(5, 0.0);
    if (subspace_index(zero, Orientation::tail) != 0)
      return std::pair{false, std::string("zero vector depth")};
    if (subspace_index(unit(5, 4), Orientation::tail) != 1)
      return std::pair{false, std::string("last-coordinate depth")};
    if (subspace_index(unit(5, 0), Orientation::head) != 1)
      return std::pair{false, std::string("first-coordinate depth")};
    if (subspace_index(unit(5, 0), Orientation::tail) != 5)
      return std::pair{false, std::string("first coordinate is deepest tail")};
    return std::pair{true, std::string("definitional cases hold")};
  });
}

// ----------------------------------------------------------------- spanjump

// Predicted depth after one oracle call at depth k with component i.
int predicted_depth(const HardInstance& inst, int k, int i) {
  const int cap = inst.dim();
  if (k >= cap) return cap;
  return i == extender_component(inst, k) ? k + 1 : k;
}

std::pair<bool, std::string> span_jump_family(const HardInstance& inst,
                                              std::uint64_t seed, int sequences) {
  Rng rng(seed);
  const int dim = inst.dim();
  const double glimit = prox_gamma_limit(inst);
  double worst = 0.0;
  for (int s = 0; s < sequences; ++s) {
    Vec x(dim, 0.0);
    int k = 0;
    const int steps = 2 + static_cast<int>(rng.u01() * 6);
    for (int step = 0; step < steps; ++step) {
      const int i = rng.index1(inst.n);
      const double gamma = std::isfinite(glimit)
                               ? rng.log_uniform(1e-4 * glimit, 0.99 * glimit)
                               : rng.log_uniform(1e-3 / inst.L, 1e3 / inst.L);
      const OracleReply r = pifo_call(inst, i, x, gamma);
      const int kp = predicted_depth(inst, k, i);
      const double sg = norm_inf(r.gradient), sp = norm_inf(r.prox_point);
      // coordinates outside the predicted subspace must vanish
      for (int j = 0; j < dim; ++j) {
        const bool inside = inst.orient == Orientation::tail ? j >= dim - kp
                                                             : j < kp;
        if (inside) continue;
        worst = std::max(worst, std::abs(r.gradient[j]) / (1e-300 + sg));
        worst = std::max(worst, std::abs(r.prox_point[j]) / (1e-300 + sp));
      }
      // move inside the new subspace with a random span combination
      const double a = rng.uniform(-1.0, 1.0);
      const double b = rng.uniform(-1.0, 1.0);
      Vec nx = r.prox_point;
      scale(nx, 1.0 + a);
      axpy(b, r.gradient, nx);
      axpy(rng.uniform(-1.0, 1.0), x, nx);
      const double nn = norm_inf(nx);
      if (nn > 1e3) scale(nx, 1.0 / nn);
      x = std::move(nx);
      k = kp;
    }
  }
  return bounded(worst, 1e-12, "worst leaked coordinate (relative)");
}

void suite_spanjump(Ctx& ctx) {
  const auto run_family = [&](const std::string& name, HardInstance inst,
                              std::uint64_t salt) {
    ctx.check("span_jump_" + name,
              [&, inst = std::move(inst), salt]() -> std::pair<bool, std::string> {
      return span_jump_family(inst, derive_seed(ctx.seed, salt), 1000);
    });
  };
  run_family("sc", sample_sc(), 11);
  run_family("c", sample_c(), 12);
  run_family("avg_sc", sample_avg_sc(), 13);
  run_family("avg_c", sample_avg_c(), 14);
  run_family("nc", sample_nc(), 15);

  ctx.check("greedy_probe_depth_obeys_extender", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_sc();
    const SamplingScheme scheme = SamplingScheme::uniform(inst.n, 77);
    const RunTrace tr = greedy_span_probe(inst, scheme, 200, ctx.seed);
    int k = 0;
    for (int i : tr.draws) {
      const int kp = predicted_depth(inst, k, i);
      if (kp - k > 1) return std::pair{false, std::string("depth jumped by 2")};
      k = kp;
    }
    const int kfin = subspace_index(tr.final_x, inst.orient);
    if (kfin > k)
      return std::pair{false, std::string("realized depth exceeded prediction")};
    return std::pair{true, "final depth " + fmt(kfin) + " within certified " +
                               fmt(k)};
  });
}

// --------------------------------------------------------------- minimizers

void suite_minimizers(Ctx& ctx) {
  ctx.check("sc_minimizer_matches_dense", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (int n : {2, 5, 10}) {
      for (double kmul : {0.0, 10.0, 100.0}) {
        const double kappa = kmul == 0.0 ? n / 2.0 + 1.0 : kmul * n;
        const HardInstance inst = make_sc(kappa, 1.0, n, 1.0, 1e-4);
        const auto [xstar, fstar] = minimizer(inst);
        const Vec ref = dense::dense_minimizer(inst);
        worst = std::max(worst, norm2(sub(xstar, ref)) / norm2(ref));
        worst = std::max(worst, std::abs(fstar - full_value(inst, xstar)) /
                                    std::abs(fstar));
      }
    }
    return bounded(worst, 1e-9, "relative minimizer error");
  });

  ctx.check("restricted_gap_closed_forms", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (const HardInstance& inst : {make_sc(40.0, 1.0, 5, 1.0, 1e-4),
                                     make_c(10.0, 1.0, 4, 1e-3)}) {
      const double fstar_dense =
          full_value(inst, dense::dense_minimizer(inst));
      for (int k : {1, inst.m / 2, inst.m - 1}) {
        const double gap = restricted_gap(inst, k);
        const double dense_gap =
            full_value(inst, dense::dense_restricted_minimizer(inst, k)) -
            fstar_dense;
        worst = std::max(worst, std::abs(gap - dense_gap) / dense_gap);
      }
    }
    return bounded(worst, 1e-9, "relative gap error");
  });

  ctx.check("restricted_gap_nonincreasing", [&]() -> std::pair<bool, std::string> {
    for (const HardInstance& inst :
         {sample_sc(), sample_c(), sample_avg_sc(), sample_avg_c()}) {
      double prev = restricted_gap(inst, 0);
      for (int k = 1; k <= inst.m; ++k) {
        const double g = restricted_gap(inst, k);
        if (g > prev * (1.0 + 1e-12))
          return std::pair{false, std::string("gap increased at depth ") + fmt(k)};
        prev = g;
      }
    }
    return std::pair{true, std::string("gap nonincreasing in depth")};
  });

  ctx.check("restricted_distance_closed_form", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_sc();
    const auto [xstar, fstar] = minimizer(inst);
    double worst = std::abs(restricted_min_distance(inst, 0) - dot(xstar, xstar)) /
                   dot(xstar, xstar);
    worst = std::max(worst, std::abs(restricted_min_distance(inst, inst.m)));
    return bounded(worst, 1e-12, "distance formula error");
  });

  ctx.check("gradient_vanishes_at_minimizer", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (const HardInstance& inst :
         {sample_sc(), sample_c(), sample_avg_sc(), sample_avg_c(),
          sample_one_d()}) {
      const auto [xstar, fstar] = minimizer(inst);
      worst = std::max(worst, norm2(full_gradient(inst, xstar)) /
                                  (1.0 + std::abs(fstar)));
    }
    return bounded(worst, 1e-9, "gradient norm at minimizer");
  });

  ctx.check("one_d_closed_forms", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_one_d();
    const auto [xstar, fstar] = minimizer(inst);
    if (std::abs(xstar[0] - inst.Bdist) > 1e-12)
      return std::pair{false, std::string("minimizer is not B")};
    const double gap = full_value(inst, Vec{0.0}) - fstar;
    if (std::abs(gap - 0.5 * inst.L * inst.Bdist * inst.Bdist) > 1e-12)
      return std::pair{false, std::string("initial gap is not L B^2 / 2")};
    for (int i = 2; i <= inst.n; ++i) {
      if (std::abs(component_gradient(inst, i, Vec{0.0})[0]) != 0.0)
        return std::pair{false, std::string("idle component moves at 0")};
      if (std::abs(component_prox(inst, i, Vec{0.0}, 0.7)[0]) != 0.0)
        return std::pair{false, std::string("idle prox moves at 0")};
    }
    return std::pair{true, std::string("one-dimensional family checks out")};
  });

  ctx.check("serialization_roundtrip_bit_identical", [&]() -> std::pair<bool, std::string> {
    for (const HardInstance& inst :
         {sample_sc(), sample_c(), sample_avg_sc(), sample_avg_c(),
          sample_one_d(), sample_nc()}) {
      const HardInstance back = instance_from_json(instance_to_json(inst));
      const auto same = [](double a, double b) {
        return std::memcmp(&a, &b, sizeof a) == 0;
      };
      if (!same(inst.L, back.L) || !same(inst.lambda0, back.lambda0) ||
          !same(inst.q, back.q) || !same(inst.xi, back.xi) ||
          !same(inst.nc_lambda, back.nc_lambda) || inst.m != back.m)
        return std::pair{false, std::string("scalar changed across round trip")};
    }
    return std::pair{true, std::string("hex round trip reproduces all scalars")};
  });

  ctx.check("certificates_meet_gap_floor", [&]() -> std::pair<bool, std::string> {
    for (const HardInstance& inst :
         {sample_sc(), sample_c(), sample_avg_sc(), sample_avg_c(),
          sample_nc()}) {
      const Certificate cert = certificate(inst, inst.eps);
      if (cert.M < 1) return std::pair{false, std::string("certificate depth < 1")};
      if (cert.gap_at_M < 9.0 * inst.eps * (1.0 - 1e-12))
        return std::pair{false, std::string("certified gap below 9 eps")};
      if (cert.N != static_cast<long long>(inst.n) * (cert.M + 1) / 4)
        return std::pair{false, std::string("budget N mismatch")};
    }
    return std::pair{true, std::string("gap >= 9 eps and N = n(M+1)/4")};
  });

  ctx.check("constructor_domain_errors", [&]() -> std::pair<bool, std::string> {
    const auto expect_domain = [](const std::function<void()>& fn) {
      try {
        fn();
      } catch (const domain_error&) {
        return true;
      }
      return false;
    };
    if (!expect_domain([] { make_sc(2.0, 1.0, 4, 1.0, 1e-4); }))
      return std::pair{false, std::string("kappa below n/2+1 accepted")};
    if (!expect_domain([] { make_sc(10.0, 1.0, 4, 1.0, 0.01); }))
      return std::pair{false, std::string("eps/Delta above regime accepted")};
    if (!expect_domain([] { make_c(10.0, 1.0, 4, 0.1); }))
      return std::pair{false, std::string("c family accepted one_d regime")};
    if (!expect_domain([] { make_nc(100.0, 50.0, 4, 10.0, 1.0); }))
      return std::pair{false, std::string("nc eps regime accepted")};
    return std::pair{true, std::string("out-of-regime parameters rejected")};
  });

  ctx.check("smoothness_probe_within_declared", [&]() -> std::pair<bool, std::string> {
    double worst = -1e300;
    for (const HardInstance& inst :
         {sample_sc(), sample_c(), sample_avg_sc(), sample_avg_c()}) {
      for (int i = 1; i <= inst.n; ++i)
        worst = std::max(worst, smoothness_probe(inst, i, 200, ctx.seed) - inst.L);
    }
    return bounded(worst, 1e-8, "probe minus declared L");
  });

  ctx.check("strong_convexity_probe_at_least_mu", [&]() -> std::pair<bool, std::string> {
    double worst = -1e300;
    for (const HardInstance& inst : {sample_sc(), sample_avg_sc()}) {
      for (int i = 1; i <= inst.n; ++i)
        worst = std::max(worst,
                         inst.mu - strong_convexity_probe(inst, i, 200, ctx.seed));
    }
    return bounded(worst, 1e-8, "mu minus probe");
  });

  ctx.check("average_smoothness_probe_within_target", [&]() -> std::pair<bool, std::string> {
    double worst = -1e300;
    for (const HardInstance& inst : {sample_avg_sc(), sample_avg_c()}) {
      worst = std::max(worst,
                       average_smoothness_probe(inst, 1000, ctx.seed) - inst.Lavg);
    }
    return bounded(worst, 0.0, "probe minus Lavg");
  });

  ctx.check("avg_family_derived_bounds", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_avg_sc();
    const double lo = std::sqrt(inst.n / 3.0) * inst.Lavg;
    const double hi = std::sqrt(inst.n / 2.0) * inst.Lavg;
    if (!(lo <= inst.L && inst.L <= hi))
      return std::pair{false, std::string("derived L outside sqrt(n/3..n/2) Lavg")};
    if (!(inst.L / inst.mu >= inst.n / 2.0 + 1.0))
      return std::pair{false, std::string("derived condition number too small")};
    return std::pair{true, std::string("derived L within its bracket")};
  });
}

// ---------------------------------------------------------------------- geo

double two_geo_tail_enumerated(double p1, double p2, long long j) {
  // exact complement: P(X1+X2 <= j) = sum_{a=1}^{j-1} P(X1=a) P(X2 <= j-a)
  double below = 0.0;
  double pa = p1;  // P(X1 = a) starting at a = 1
  for (long long a = 1; a <= j - 1; ++a) {
    const double cdf2 = 1.0 - std::pow(1.0 - p2, static_cast<double>(j - a));
    below += pa * cdf2;
    pa *= (1.0 - p1);
  }
  return 1.0 - below;
}

void suite_geo(Ctx& ctx) {
  ctx.check("two_geo_tail_matches_enumeration", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (int a = 1; a <= 19; ++a) {
      for (int b = 1; b <= 19; ++b) {
        const double p1 = 0.05 * a, p2 = 0.05 * b;
        for (long long j : {1LL, 2LL, 3LL, 5LL, 12LL, 30LL}) {
          worst = std::max(worst, std::abs(two_geo_tail(p1, p2, j) -
                                           two_geo_tail_enumerated(p1, p2, j)));
        }
      }
    }
    return bounded(worst, 1e-10, "formula vs enumeration");
  });

  ctx.check("two_geo_tail_monotone", [&]() -> std::pair<bool, std::string> {
    for (double p1 : {0.1, 0.4, 0.7}) {
      for (double p2 : {0.2, 0.5, 0.9}) {
        double prev = 1.0;
        for (long long j = 1; j <= 25; ++j) {
          const double v = two_geo_tail(p1, p2, j);
          if (v > prev + 1e-12)
            return std::pair{false, std::string("tail increased in j")};
          prev = v;
        }
      }
    }
    for (long long j : {2LL, 6LL, 15LL}) {
      for (double p2 : {0.5, 0.9}) {
        double prev = 1.0;
        for (double p1 = 0.05; p1 <= p2 + 1e-9; p1 += 0.05) {
          const double v = two_geo_tail(p1, p2, j);
          if (v > prev + 1e-12)
            return std::pair{false, std::string("tail increased in p1")};
          prev = v;
        }
      }
    }
    return std::pair{true, std::string("nonincreasing in j and in each p")};
  });

  ctx.check("averaging_dominance_full_sweep", [&]() -> std::pair<bool, std::string> {
    for (int a = 1; a <= 19; ++a) {
      for (int b = a; b <= 19; ++b) {
        for (long long j = 1; j <= 20; ++j) {
          if (!averaging_dominance_check(0.05 * a, 0.05 * b, j))
            return std::pair{false, "violated at p1=" + fmt(0.05 * a) +
                                        " p2=" + fmt(0.05 * b) + " j=" + fmt(j)};
        }
      }
    }
    return std::pair{true, std::string("unequal tail dominates averaged tail")};
  });

  ctx.check("uniform_minimizes_tail", [&]() -> std::pair<bool, std::string> {
    // exact for two variables
    for (double sum : {0.4, 0.8, 1.2}) {
      for (long long j : {3LL, 8LL}) {
        const double base = two_geo_tail(sum / 2.0, sum / 2.0, j);
        for (double d : {0.05, 0.1, 0.15}) {
          if (two_geo_tail(sum / 2.0 - d, sum / 2.0 + d, j) < base - 1e-12)
            return std::pair{false, std::string("uniform pair not minimal")};
        }
      }
    }
    // Monte Carlo for K in {3, 4}
    Rng rng(derive_seed(ctx.seed, 41));
    for (int k : {3, 4}) {
      GeoSumModel uni;
      uni.probs.assign(k, 0.25);
      const double threshold = k * k / (4.0 * (0.25 * k));
      const TailReport base =
          geo_sum_tail_mc(uni, threshold, 40000, derive_seed(ctx.seed, 42), ctx.jobs);
      for (int rep = 0; rep < 4; ++rep) {
        GeoSumModel other;
        double left = 0.25 * k;
        for (int l = 0; l < k - 1; ++l) {
          const double p = std::min(0.95, std::max(0.02, left * rng.uniform(0.2, 0.8)));
          other.probs.push_back(p);
          left -= p;
        }
        if (left <= 0.02 || left > 1.0) {
          continue;  // resample shape outside the simplex
        }
        other.probs.push_back(left);
        const TailReport t = geo_sum_tail_mc(other, threshold, 40000,
                                             derive_seed(ctx.seed, 43 + rep),
                                             ctx.jobs);
        const double margin = 3.0 * (t.sigma_hat + base.sigma_hat);
        if (t.empirical_prob < base.empirical_prob - margin)
          return std::pair{false, std::string("uniform vector not minimal (mc)")};
      }
    }
    return std::pair{true, std::string("uniform probabilities minimize the tail")};
  });

  ctx.check("geo_sum_tail_chebyshev_floor", [&]() -> std::pair<bool, std::string> {
    double worst = 1e300;
    for (int k : {8, 16, 32}) {
      for (int n : {4, 8}) {
        GeoSumModel model;
        model.probs.assign(k, 1.0 / n);
        const double threshold = k * k / (4.0 * (static_cast<double>(k) / n));
        const TailReport t = geo_sum_tail_mc(model, threshold, 100000,
                                             derive_seed(ctx.seed, 51), ctx.jobs);
        worst = std::min(worst, t.empirical_prob -
                                    (t.bound - 3.0 * t.sigma_hat));
      }
    }
    return {worst >= 0.0, "worst margin above 1-16/(9K) floor = " + fmt(worst)};
  });

  ctx.check("geo_sum_exact_tail_consistency", [&]() -> std::pair<bool, std::string> {
    // the convolution evaluator must reproduce the two-variable closed form
    double worst = 0.0;
    for (double p1 : {0.1, 0.35, 0.6}) {
      for (double p2 : {0.2, 0.5, 0.95}) {
        GeoSumModel pair;
        pair.probs = {p1, p2};
        for (long long j : {2LL, 5LL, 17LL}) {
          worst = std::max(worst, std::abs(geo_sum_tail_exact(pair, j) -
                                           two_geo_tail(p1, p2, j)));
        }
      }
    }
    // and the exact tail never falls below the 1 - 16/(9K) floor
    for (int k : {2, 3, 4, 6}) {
      GeoSumModel m;
      m.probs.assign(k, 0.25);
      const long long threshold =
          static_cast<long long>(k * k / (4.0 * 0.25 * k));
      const double tail = geo_sum_tail_exact(m, threshold);
      if (tail < 1.0 - 16.0 / (9.0 * k))
        return {false, "exact tail fell below the floor at K=" + fmt(k)};
    }
    return bounded(worst, 1e-12, "exact vs closed-form tail");
  });

  ctx.check("stopping_time_expectation", [&]() -> std::pair<bool, std::string> {
    const SamplingScheme scheme = SamplingScheme::uniform(4, 123);
    const int upto = 6;
    const GeoSumModel model = GeoSumModel::from_scheme(scheme, upto);
    double want = 0.0;
    for (double q : model.probs) want += 1.0 / q;
    double var = 0.0;
    for (double q : model.probs) var += (1.0 - q) / (q * q);
    const std::int64_t trials = 100000;
    Rng rng(derive_seed(ctx.seed, 52));
    double acc = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
      std::int64_t sum = 0;
      for (double q : model.probs) sum += draw_geometric(rng, q);
      acc += static_cast<double>(sum);
    }
    const double got = acc / trials;
    const double sigma = std::sqrt(var / trials);
    return {std::abs(got - want) <= 3.0 * sigma,
            "E[T_k] = " + fmt(got) + " vs " + fmt(want) + " (3 sigma " +
                fmt(3.0 * sigma) + ")"};
  });

  ctx.check("stopping_time_increments_geometric", [&]() -> std::pair<bool, std::string> {
    // chi-square of T_2 - T_1 increments against geometric(p_2') at 1%
    const int n = 4;
    const SamplingScheme scheme = SamplingScheme::uniform(n, 321);
    const std::int64_t traces = 100000;
    const int bins = 12;  // last bin is the tail
    std::vector<double> observed(bins, 0.0);
    for (std::int64_t s = 0; s < traces; ++s) {
      SamplingScheme local = scheme;
      local.seed = derive_seed(ctx.seed, 6000 + s);
      std::vector<int> draws;
      for (int t = 0; t < 200; ++t) draws.push_back(sample_index(local, t));
      const auto times = stopping_times(draws, n, 2);
      if (times[1] < 0) continue;
      const std::int64_t inc = times[1] - times[0];
      observed[std::min<std::int64_t>(inc - 1, bins - 1)] += 1.0;
    }
    double total = 0.0;
    for (double o : observed) total += o;
    const double p = 1.0 / n;
    double stat = 0.0;
    double tail = 1.0;
    for (int b = 0; b < bins; ++b) {
      const double prob =
          b + 1 < bins ? p * std::pow(1.0 - p, b) : tail;
      tail -= prob;
      const double expected = total * prob;
      stat += (observed[b] - expected) * (observed[b] - expected) / expected;
    }
    // Wilson-Hilferty approximation of the chi-square 99% quantile
    const double df = bins - 1;
    const double z = 2.3263478740408408;
    const double crit =
        df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3);
    return {stat <= crit,
            "chi-square " + fmt(stat) + " vs 1% critical " + fmt(crit)};
  });

  ctx.check("certificate_tail_sc", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_sc();
    const SamplingScheme scheme = SamplingScheme::uniform(inst.n, 9);
    const TailReport t = certificate_tail_check(inst, scheme, 10000,
                                                derive_seed(ctx.seed, 61),
                                                ctx.jobs);
    const double floor = t.bound - 3.0 * t.sigma_hat;
    return {t.empirical_prob >= floor,
            "P(T_{M+1} > N) = " + fmt(t.empirical_prob) + " floor " + fmt(floor)};
  });

  ctx.check("certificate_tail_skew_no_worse", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_sc();
    const SamplingScheme uni = SamplingScheme::uniform(inst.n, 9);
    const SamplingScheme skew =
        SamplingScheme::explicit_probs({0.1, 0.2, 0.3, 0.4}, 9);
    const TailReport tu = certificate_tail_check(inst, uni, 20000,
                                                 derive_seed(ctx.seed, 62),
                                                 ctx.jobs);
    const TailReport ts = certificate_tail_check(inst, skew, 20000,
                                                 derive_seed(ctx.seed, 63),
                                                 ctx.jobs);
    const double margin = 3.0 * (tu.sigma_hat + ts.sigma_hat);
    return {ts.empirical_prob >= tu.empirical_prob - margin,
            "skewed " + fmt(ts.empirical_prob) + " vs uniform " +
                fmt(tu.empirical_prob)};
  });

  ctx.check("certificate_tail_one_d", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_one_d();
    const SamplingScheme scheme = SamplingScheme::uniform(inst.n, 9);
    const TailReport t = certificate_tail_check(inst, scheme, 10000,
                                                derive_seed(ctx.seed, 64),
                                                ctx.jobs);
    const double floor = t.bound - 3.0 * t.sigma_hat;
    return {t.empirical_prob >= floor,
            "P(T > 1/(2 p1)) = " + fmt(t.empirical_prob) + " floor " + fmt(floor)};
  });

  ctx.check("fit_complexity_self_consistency", [&]() -> std::pair<bool, std::string> {
    std::vector<FitRecord> records;
    for (double n : {4.0, 16.0, 64.0}) {
      for (double mult : {2.0, 8.0, 32.0}) {
        const double kappa = mult * n;
        const double lr = std::log(1e6);
        records.push_back(
            {n, kappa, lr, 3.0 * n * lr + 1.5 * std::sqrt(n * kappa) * lr});
      }
    }
    const FitSummary fit = fit_complexity(records);
    const bool ok = fit.r2 >= 0.999 && std::abs(fit.a - 3.0) < 1e-6 &&
                    std::abs(fit.b - 1.5) < 1e-6;
    return std::pair{ok, "recovered a=" + fmt(fit.a) + " b=" + fmt(fit.b) +
                             " r2=" + fmt(fit.r2)};
  });
}

// ---------------------------------------------------------------- nonconvex

void suite_nonconvex(Ctx& ctx) {
  ctx.check("gamma_well_closed_form_vs_quadrature", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (double x : {-3.0, -1.0, -0.3, 0.0, 0.2, 0.7, 1.0, 1.4, 2.5, 6.0}) {
      const double quad = dense::integrate(
          [](double t) { return 120.0 * t * t * (t - 1.0) / (1.0 + t * t); },
          1.0, x, 1e-13);
      worst = std::max(worst, std::abs(gamma_well(x) - quad));
    }
    return bounded(worst, 1e-10, "antiderivative vs quadrature");
  });

  ctx.check("gamma_well_definitional_points", [&]() -> std::pair<bool, std::string> {
    if (gamma_well(1.0) != 0.0)
      return std::pair{false, std::string("gamma_well(1) != 0")};
    if (gamma_well_d1(0.0) != 0.0)
      return std::pair{false, std::string("slope at 0 is nonzero")};
    double worst = 0.0;
    for (double x = -4.0; x <= 4.0; x += 1.0 / 64) {
      worst = std::max(worst, -(gamma_well_d2(x) - kGammaWellLowerCurvature));
      worst = std::max(worst, gamma_well_d2(x) - kGammaWellUpperCurvature);
    }
    return bounded(worst, 0.0, "curvature bracket slack");
  });

  ctx.check("nc_constants_within_declared", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_nc();
    const double l1 = 45.0 * (std::sqrt(3.0) - 1.0) * inst.L * inst.nc_alpha /
                      (3.0 * inst.n);
    const double l2 = inst.L / (3.0 * inst.n) * (2.0 * inst.n + 180.0 * inst.nc_alpha);
    if (!(l1 <= inst.sigma * (1.0 + 1e-12)))
      return std::pair{false, std::string("lower modulus exceeds sigma")};
    if (!(l2 <= inst.L * (1.0 + 1e-12)))
      return std::pair{false, std::string("upper modulus exceeds L")};
    return std::pair{true, std::string("derived moduli inside (sigma, L)")};
  });

  ctx.check("nc_bracket_sampling", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_nc();
    for (int i = 1; i <= inst.n; ++i) {
      const BracketCheck r = nc_bracket_check(inst, i, 250, ctx.seed);
      if (!r.ok)
        return std::pair{false, "bracket violated: lower margin " +
                                    fmt(r.worst_lower) + ", upper " +
                                    fmt(r.worst_upper)};
    }
    return std::pair{true, std::string("(-sigma, L) bracket holds on samples")};
  });

  ctx.check("nc_gradient_floor", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_nc();
    const double floor = std::pow(inst.nc_alpha, 0.75) * inst.nc_lambda /
                         (4.0 * inst.nc_beta);
    Rng rng(derive_seed(ctx.seed, 71));
    double worst = 1e300;
    for (int rep = 0; rep < 100; ++rep) {
      Vec x = rng.normal_vec(inst.dim());
      scale(x, inst.nc_beta);
      x[inst.m - 1] = 0.0;  // coordinates m and m+1
      x[inst.m] = 0.0;
      worst = std::min(worst, norm2(full_gradient(inst, x)));
    }
    return {worst >= floor * (1.0 - 1e-9),
            "min grad norm " + fmt(worst) + " vs floor " + fmt(floor)};
  });

  ctx.check("nc_initial_gap_bound", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_nc();
    const double bound = inst.nc_lambda * (std::sqrt(inst.nc_alpha) / 2.0 +
                                           10.0 * inst.nc_alpha * inst.m);
    if (!(bound <= inst.Delta * (1.0 + 1e-12)))
      return std::pair{false, std::string("lambda bound exceeds Delta")};
    // descent from the origin can decrease by at most the bound
    Vec x(inst.dim(), 0.0);
    const double f0 = full_value(inst, x);
    const double lf = inst.nc_lambda *
                      (4.0 + 180.0 * inst.nc_alpha) /
                      (inst.nc_beta * inst.nc_beta);
    const double step = 1.0 / lf;
    for (int it = 0; it < 4000; ++it) {
      axpy(-step, full_gradient(inst, x), x);
    }
    const double achieved = f0 - full_value(inst, x);
    return {achieved <= bound * (1.0 + 1e-9) && achieved > 0.0,
            "descent decreased " + fmt(achieved) + " <= bound " + fmt(bound)};
  });

  ctx.check("nc_prox_stationarity", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_nc();
    const double glimit = prox_gamma_limit(inst);
    Rng rng(derive_seed(ctx.seed, 72));
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const int i = rng.index1(inst.n);
      Vec x = rng.normal_vec(inst.dim());
      scale(x, inst.nc_beta * rng.log_uniform(0.1, 10.0));
      const double gamma = rng.log_uniform(1e-4 * glimit, 0.99 * glimit);
      const Vec u = component_prox(inst, i, x, gamma);
      Vec resid = component_gradient(inst, i, u);
      for (int j = 0; j < inst.dim(); ++j) resid[j] += (u[j] - x[j]) / gamma;
      worst = std::max(worst,
                       norm2(resid) / (1.0 + norm2(x) / gamma));
    }
    return bounded(worst, 1e-10, "scaled stationarity residual");
  });

  ctx.check("nc_gamma_validity_fails_closed", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_nc();
    const double glimit = prox_gamma_limit(inst);
    try {
      component_prox(inst, 1, Vec(inst.dim(), 0.0), glimit);
    } catch (const domain_error&) {
      return std::pair{true, std::string("boundary gamma rejected")};
    }
    return std::pair{false, std::string("boundary gamma accepted")};
  });

  ctx.check("nc_block_uniqueness_scan", [&]() -> std::pair<bool, std::string> {
    const HardInstance inst = sample_nc();
    const double glimit = prox_gamma_limit(inst);
    Rng rng(derive_seed(ctx.seed, 73));
    for (int rep = 0; rep < 20; ++rep) {
      const double gamma = rng.log_uniform(0.3 * glimit, 0.99 * glimit);
      const double a = 1.0 / gamma;
      const double kg = inst.nc_lambda * inst.nc_alpha / inst.nc_beta;
      const double rhs = rng.uniform(-2.0, 2.0) * a * inst.nc_beta;
      // count sign changes of the scalar block residual on a 1e4-point grid
      int roots = 0;
      double prev = 0.0;
      bool have_prev = false;
      for (int g = 0; g <= 10000; ++g) {
        const double u = (-10.0 + 20.0 * g / 10000.0) * inst.nc_beta;
        const double r = a * u + kg * gamma_well_d1(u / inst.nc_beta) - rhs;
        if (have_prev && ((prev < 0.0 && r >= 0.0) || (prev > 0.0 && r <= 0.0)))
          ++roots;
        prev = r;
        have_prev = true;
      }
      if (roots > 1)
        return std::pair{false, std::string("second scalar block root found")};
    }
    return std::pair{true, std::string("scalar block residual has a single root")};
  });

  ctx.check("nc_pair_block_uniqueness_scan", [&]() -> std::pair<bool, std::string> {
    // the 2x2 block residual vanishes only at the solved point: its Jacobian
    // has eigenvalues >= delta0 = 1/gamma - 45(sqrt3-1) kg / beta > 0, so
    // |residual(u)| >= delta0 |u - u*| and a grid scan cannot find a second
    // near-zero away from u*
    const HardInstance inst = sample_nc();
    const double glimit = prox_gamma_limit(inst);
    Rng rng(derive_seed(ctx.seed, 75));
    const double kq = inst.nc_lambda * inst.n / (inst.nc_beta * inst.nc_beta);
    const double kg = inst.nc_lambda * inst.nc_alpha / inst.nc_beta;
    const double beta = inst.nc_beta;
    for (int rep = 0; rep < 10; ++rep) {
      const double gamma = rng.log_uniform(0.2 * glimit, 0.99 * glimit);
      const double a = 1.0 / gamma;
      const double delta0 = a + kg / beta * kGammaWellLowerCurvature;
      // find a pair block of some component and its solved value
      const int j = rng.index1(inst.n);
      Vec x = rng.normal_vec(inst.dim());
      scale(x, beta * rng.log_uniform(0.3, 3.0));
      const Vec u = component_prox(inst, j, x, gamma);
      int s0 = -1, s1 = -1;
      for (int l : inst.part.groups[j - 1]) {
        if (l == inst.dim()) continue;
        s0 = inst.dim() - l - 1;
        s1 = inst.dim() - l;
        break;
      }
      if (s0 < 0) continue;
      const double y0 = x[s0] / gamma + (j == 1 && s0 == 0
                                             ? inst.nc_lambda * inst.n *
                                                   std::sqrt(inst.nc_alpha) /
                                                   inst.nc_beta
                                             : 0.0);
      const double y1 = x[s1] / gamma;
      const bool b0 = s0 < inst.m, b1 = s1 < inst.m;
      const double span = 10.0 * std::max({beta, std::abs(u[s0]), std::abs(u[s1])});
      const double cell = 2.0 * span / 100.0;
      const double radius = 2.0 * cell * 1.4142135623730951;
      for (int g0i = 0; g0i <= 100; ++g0i) {
        for (int g1i = 0; g1i <= 100; ++g1i) {
          const double v0 = u[s0] - span + cell * g0i;
          const double v1 = u[s1] - span + cell * g1i;
          const double r0 = kq * (v0 - v1) + a * v0 - y0 +
                            (b0 ? kg * gamma_well_d1(v0 / beta) : 0.0);
          const double r1 = kq * (v1 - v0) + a * v1 - y1 +
                            (b1 ? kg * gamma_well_d1(v1 / beta) : 0.0);
          const double rn = std::sqrt(r0 * r0 + r1 * r1);
          const double dist = std::hypot(v0 - u[s0], v1 - u[s1]);
          if (rn < delta0 * radius && dist > radius)
            return {false, "second residual zero found at distance " + fmt(dist)};
        }
      }
    }
    return {true, std::string(
                      "10^4-point scans found no second root in any pair block")};
  });

  ctx.check("span_jump_nc", [&]() -> std::pair<bool, std::string> {
    return span_jump_family(sample_nc(), derive_seed(ctx.seed, 74), 400);
  });
}

}  // namespace

bool VerifyReport::all_passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

std::vector<std::string> verify_suites() {
  return {"structure", "spanjump", "minimizers", "geo", "nonconvex", "all"};
}

VerifyReport run_suite(const std::string& suite, std::uint64_t seed, int jobs) {
  VerifyReport report;
  report.suite = suite;
  Ctx ctx{seed, jobs, &report.checks};
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "structure") suite_structure(ctx), known = true;
  if (all || suite == "spanjump") suite_spanjump(ctx), known = true;
  if (all || suite == "minimizers") suite_minimizers(ctx), known = true;
  if (all || suite == "geo") suite_geo(ctx), known = true;
  if (all || suite == "nonconvex") suite_nonconvex(ctx), known = true;
  if (!known) throw domain_error("unknown verify suite '" + suite + "'");
  return report;
}

std::string report_json(const VerifyReport& report) {
  nlohmann::json j;
  j["suite"] = report.suite;
  j["passed"] = report.all_passed();
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : report.checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["detail"] = c.detail;
    checks.push_back(jc);
  }
  j["checks"] = checks;
  return j.dump(2);
}

}  // namespace pifo
