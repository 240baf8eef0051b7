#include <doctest.h>

#include <cmath>

#include "pifo/analysis.hpp"
#include "pifo/errors.hpp"
#include "pifo/instances.hpp"
#include "pifo/rng.hpp"
#include "pifo/solvers.hpp"

using namespace pifo;

namespace {

std::int64_t draw_geo(Rng& rng, double p) {
  double u;
  do {
    u = rng.u01();
  } while (u == 0.0);
  return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

}  // namespace

TEST_CASE("stopping times follow the recursive definition") {
  // hand evaluation: n = 3, draws (2,1,3,2,3,1,2): component of class k is
  // 1-based k mod 3
  const std::vector<int> draws{2, 1, 3, 2, 3, 1, 2};
  const auto times = stopping_times(draws, 3, 4);
  CHECK(times[0] == 2);  // first draw of component 1
  CHECK(times[1] == 4);  // first draw of component 2 after step 2
  CHECK(times[2] == 5);  // first draw of component 3 after step 4
  CHECK(times[3] == 6);  // class 4 = component 1 again
  // censoring: component 3 never appears
  const auto censored = stopping_times({1, 2, 1, 2}, 3, 3);
  CHECK(censored[0] == 1);
  CHECK(censored[1] == 2);
  CHECK(censored[2] == -1);
}

TEST_CASE("two geometric tail closed forms") {
  // equal case: complement of {X1 = X2 = 1}
  CHECK(two_geo_tail(0.5, 0.5, 2) == doctest::Approx(0.75).epsilon(1e-15));
  // j = 1 is certain
  for (double p1 : {0.05, 0.5, 1.0})
    for (double p2 : {0.3, 1.0}) CHECK(two_geo_tail(p1, p2, 1) == 1.0);
  // degenerate pair at p = 1: the sum is exactly 2
  CHECK(two_geo_tail(1.0, 1.0, 2) == 0.0);
  CHECK_THROWS_AS(two_geo_tail(0.0, 0.5, 3), domain_error);
  CHECK_THROWS_AS(two_geo_tail(0.5, 1.5, 3), domain_error);
}

TEST_CASE("two geometric tail agrees with monte carlo") {
  const double p1 = 0.3, p2 = 0.6;
  const long long j = 5;
  const double exact = two_geo_tail(p1, p2, j);
  Rng rng(2024);
  const int trials = 1000000;
  int hits = 0;
  for (int t = 0; t < trials; ++t)
    if (draw_geo(rng, p1) + draw_geo(rng, p2) > j) ++hits;
  const double emp = double(hits) / trials;
  const double sigma = std::sqrt(emp * (1.0 - emp) / trials);
  CHECK(std::abs(emp - exact) <= 4.0 * sigma);
}

TEST_CASE("near equal probabilities avoid the cancellation branch") {
  const double p = 0.37;
  const double base = two_geo_tail(p, p, 9);
  CHECK(two_geo_tail(p, p * (1.0 + 1e-13), 9) ==
        doctest::Approx(base).epsilon(1e-12));
  CHECK(two_geo_tail(p, p * (1.0 + 1e-9), 9) ==
        doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("averaging dominance") {
  CHECK(averaging_dominance_check(0.4, 0.4, 7));   // equality case
  CHECK(averaging_dominance_check(0.2, 0.8, 4));
  for (int a = 1; a <= 19; ++a)
    for (int b = a; b <= 19; ++b)
      for (long long j = 1; j <= 20; ++j)
        CHECK(averaging_dominance_check(0.05 * a, 0.05 * b, j));
}

TEST_CASE("geometric sum tails") {
  GeoSumModel model;
  model.probs.assign(8, 0.25);
  const TailReport certain = geo_sum_tail_mc(model, 0.0, 2000, 9, 2);
  CHECK(certain.empirical_prob == 1.0);

  GeoSumModel sure;
  sure.probs.assign(5, 1.0);
  const TailReport zero = geo_sum_tail_mc(sure, 5.0, 2000, 9, 1);
  CHECK(zero.empirical_prob == 0.0);

  // chebyshev-style floor at threshold K^2 / (4 sum q)
  for (int k : {8, 16}) {
    GeoSumModel m;
    m.probs.assign(k, 0.25);
    const double threshold = k * k / (4.0 * 0.25 * k);
    const TailReport t = geo_sum_tail_mc(m, threshold, 20000, 11, 2);
    CHECK(t.empirical_prob >= t.bound - 3.0 * t.sigma_hat);
  }
}

TEST_CASE("exact geometric sum tail") {
  // two variables reduce to the closed form
  GeoSumModel pair;
  pair.probs = {0.3, 0.6};
  for (long long j : {2LL, 5LL, 11LL})
    CHECK(geo_sum_tail_exact(pair, j) ==
          doctest::Approx(two_geo_tail(0.3, 0.6, j)).epsilon(1e-13));
  // below the minimum support the tail is certain
  GeoSumModel three;
  three.probs = {0.5, 0.5, 0.5};
  CHECK(geo_sum_tail_exact(three, 2) == 1.0);
  // three variables against monte carlo
  const double exact = geo_sum_tail_exact(three, 8);
  Rng rng(515);
  int hits = 0;
  const int trials = 200000;
  for (int t = 0; t < trials; ++t) {
    std::int64_t sum = 0;
    for (int l = 0; l < 3; ++l) sum += draw_geo(rng, 0.5);
    if (sum > 8) ++hits;
  }
  const double emp = double(hits) / trials;
  CHECK(std::abs(emp - exact) <= 4.0 * std::sqrt(emp * (1.0 - emp) / trials));
}

TEST_CASE("monte carlo results do not depend on the thread count") {
  GeoSumModel model;
  model.probs.assign(6, 0.2);
  const TailReport a = geo_sum_tail_mc(model, 20.0, 30000, 5, 1);
  const TailReport b = geo_sum_tail_mc(model, 20.0, 30000, 5, 3);
  CHECK(a.empirical_prob == b.empirical_prob);
}

TEST_CASE("certificate tails meet their floors") {
  const HardInstance sc = make_sc(10.0, 1.0, 4, 1.0, 1e-4);
  const SamplingScheme uni = SamplingScheme::uniform(4, 3);
  const TailReport t = certificate_tail_check(sc, uni, 4000, 21, 2);
  CHECK(t.bound == doctest::Approx(1.0 / 9.0));
  CHECK(t.empirical_prob >= t.bound - 3.0 * t.sigma_hat);

  const HardInstance od = make_one_d(10.0, 1.0, 4);
  const TailReport t1 = certificate_tail_check(od, uni, 4000, 22, 2);
  CHECK(t1.bound == 0.5);
  CHECK(t1.threshold == doctest::Approx(2.0));  // 1 / (2 p1) with p1 = 1/4
  CHECK(t1.empirical_prob >= t1.bound - 3.0 * t1.sigma_hat);
}

TEST_CASE("expected stopping time matches the harmonic sum") {
  const SamplingScheme scheme = SamplingScheme::explicit_probs(
      {0.1, 0.2, 0.3, 0.4}, 17);
  const GeoSumModel model = GeoSumModel::from_scheme(scheme, 6);
  // q cycles through the sorted probabilities
  CHECK(model.probs == Vec{0.1, 0.2, 0.3, 0.4, 0.1, 0.2});
  double want = 0.0, var = 0.0;
  for (double q : model.probs) {
    want += 1.0 / q;
    var += (1.0 - q) / (q * q);
  }
  Rng rng(33);
  const int trials = 100000;
  double acc = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::int64_t sum = 0;
    for (double q : model.probs) sum += draw_geo(rng, q);
    acc += double(sum);
  }
  CHECK(std::abs(acc / trials - want) <= 3.0 * std::sqrt(var / trials));
}

TEST_CASE("complexity fit") {
  std::vector<FitRecord> records;
  for (double n : {4.0, 16.0, 64.0})
    for (double mult : {2.0, 8.0, 32.0}) {
      const double lr = std::log(1e6);
      records.push_back(
          {n, mult * n, lr, 2.0 * n * lr + 0.7 * std::sqrt(n * mult * n) * lr});
    }
  const FitSummary fit = fit_complexity(records);
  CHECK(fit.a == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.b == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(fit.r2 >= 0.999);

  CHECK_THROWS_AS(fit_complexity({}), domain_error);
  // six copies of one configuration cannot identify two coefficients
  std::vector<FitRecord> degenerate(6, FitRecord{4.0, 8.0, 10.0, 100.0});
  CHECK_THROWS_AS(fit_complexity(degenerate), domain_error);
}

TEST_CASE("reports serialize to json") {
  TailReport t;
  t.threshold = 8;
  t.empirical_prob = 0.5;
  t.trials = 100;
  t.bound = 1.0 / 9.0;
  t.sigma_hat = 0.05;
  const std::string j = tail_report_json(t);
  CHECK(j.find("\"empirical_prob\"") != std::string::npos);
  FitSummary f;
  f.a = 1.0;
  f.b = 2.0;
  f.r2 = 0.99;
  f.count = 9;
  CHECK(fit_summary_json(f).find("\"r2\"") != std::string::npos);
}
