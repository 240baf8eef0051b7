#include <doctest.h>

#include <string>

#include <cmath>
#include <cstring>

#include "pifo/dense.hpp"
#include "pifo/errors.hpp"
#include "pifo/instances.hpp"
#include "pifo/nonconvex.hpp"
#include "pifo/oracle.hpp"
#include "pifo/probes.hpp"
#include "pifo/rng.hpp"

using namespace pifo;

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

TEST_CASE("sc constants at the condition-number floor") {
  // kappa = n/2 + 1 makes alpha = sqrt(2) exactly
  const int n = 6;
  const HardInstance inst = make_sc(n / 2.0 + 1.0, 1.0, n, 1.0, 1e-4);
  CHECK(inst.alpha == doctest::Approx(kSqrt2).epsilon(1e-15));
  CHECK(inst.q ==
        doctest::Approx((kSqrt2 - 1.0) / (kSqrt2 + 1.0)).epsilon(1e-15));
  CHECK(inst.omega ==
        doctest::Approx(std::sqrt(2.0 / (kSqrt2 + 1.0))).epsilon(1e-15));
}

TEST_CASE("sc components carry the declared smoothness and strong convexity") {
  const HardInstance inst = make_sc(10.0, 1.0, 4, 1.0, 1e-4);
  CHECK(4.0 * inst.lambda1 + 2.0 * inst.lambda2 == doctest::Approx(10.0));
  for (int i = 1; i <= inst.n; ++i) {
    CHECK(smoothness_probe(inst, i, 300, 3) <= inst.L + 1e-8);
    CHECK(strong_convexity_probe(inst, i, 300, 3) >= inst.mu - 1e-8);
  }
}

TEST_CASE("sc minimizer and value") {
  for (int n : {2, 5}) {
    for (double kappa : {n / 2.0 + 1.0, 10.0 * n}) {
      const HardInstance inst = make_sc(kappa, 1.0, n, 1.0, 1e-4);
      const auto [xstar, fstar] = minimizer(inst);
      CHECK(fstar == doctest::Approx(-inst.Delta).epsilon(1e-12));
      CHECK(full_value(inst, xstar) ==
            doctest::Approx(-inst.Delta).epsilon(1e-9));
      const Vec ref = dense::dense_minimizer(inst);
      CHECK(norm2(sub(xstar, ref)) <= 1e-9 * norm2(ref));
    }
  }
}

TEST_CASE("c family sizing and minimizer") {
  const double L = 10.0, B = 1.0;
  const int n = 4;
  // at the regime edge eps = B^2 L / (384 n) the dimension lands on m = 3
  const double eps_edge = B * B * L / (384.0 * n);
  CHECK(make_c(L, B, n, eps_edge).m == 3);

  const HardInstance inst = make_c(L, B, n, 1e-3);
  const auto [xstar, fstar] = minimizer(inst);
  CHECK(dot(xstar, xstar) <= B * B);
  CHECK(fstar ==
        doctest::Approx(-inst.m * inst.xi * inst.xi / (inst.n * inst.L)));
  CHECK(full_value(inst, xstar) == doctest::Approx(fstar).epsilon(1e-12));
  CHECK(norm2(full_gradient(inst, xstar)) <= 1e-9);
}

TEST_CASE("avg_sc derives the inner smoothness from the average target") {
  const HardInstance inst = make_avg_sc(20.0, 1.0, 4, 1.0, 1e-4);
  CHECK(inst.L >= std::sqrt(inst.n / 3.0) * inst.Lavg);
  CHECK(inst.L <= std::sqrt(inst.n / 2.0) * inst.Lavg);
  CHECK(inst.L / inst.mu >= inst.n / 2.0 + 1.0);
  CHECK(average_smoothness_probe(inst, 500, 5) <= inst.Lavg);
  // the analytic average-smoothness constant equals the target exactly
  const double lp = 2.0 * std::sqrt(
      4.0 / inst.n * ((inst.lambda1 + inst.lambda2) * (inst.lambda1 + inst.lambda2) +
                      inst.lambda1 * inst.lambda1) +
      inst.lambda2 * inst.lambda2);
  CHECK(lp == doctest::Approx(inst.Lavg).epsilon(1e-12));
}

TEST_CASE("avg_sc sizing dominates the inner construction") {
  // the averaged family sizes its chain with the looser Lavg-based formula,
  // which can only exceed what the derived inner L would ask for
  for (double lavg : {15.0, 40.0, 120.0}) {
    const HardInstance avg = make_avg_sc(lavg, 1.0, 4, 1.0, 1e-4);
    const HardInstance inner = make_sc(avg.L, avg.mu, avg.n, avg.Delta, avg.eps);
    CHECK(avg.m >= inner.m);
    CHECK(avg.q == inner.q);  // same decay, longer chain
  }
  CHECK_THROWS_AS(make_avg_sc(2.0, 1.0, 4, 1.0, 1e-4), domain_error);
}

TEST_CASE("avg_c regime threshold and sizing identities") {
  const double Lavg = 10.0, B = 1.0;
  const int n = 4;
  // eps threshold: (sqrt2/768) B^2 Lavg / sqrt(n) = B^2 L / (384 n) under
  // L = sqrt(n/2) Lavg
  const double L = std::sqrt(n / 2.0) * Lavg;
  CHECK(kSqrt2 / 768.0 * B * B * Lavg / std::sqrt(double(n)) ==
        doctest::Approx(B * B * L / (384.0 * n)).epsilon(1e-15));
  const double eps = 1e-3;
  const HardInstance inst = make_avg_c(Lavg, B, n, eps);
  CHECK(inst.L == doctest::Approx(L).epsilon(1e-15));
  // m identity between the two published forms
  const int m_inner =
      static_cast<int>(std::floor(std::sqrt(B * B * L / (24.0 * n * eps)))) - 1;
  const int m_avg = static_cast<int>(std::floor(
                        std::pow(18.0, 0.25) / 12.0 * B * std::pow(n, -0.25) *
                        std::sqrt(Lavg / eps))) -
                    1;
  CHECK(inst.m == m_inner);
  CHECK(inst.m == m_avg);
  CHECK(average_smoothness_probe(inst, 500, 5) <= inst.Lavg);
}

TEST_CASE("one_d closed forms") {
  const HardInstance inst = make_one_d(10.0, 2.0, 4);
  const auto [xstar, fstar] = minimizer(inst);
  CHECK(xstar[0] == 2.0);
  CHECK(full_value(inst, Vec{0.0}) - fstar ==
        doctest::Approx(0.5 * 10.0 * 4.0));
  for (int i = 2; i <= 4; ++i) {
    CHECK(component_gradient(inst, i, Vec{0.0})[0] == 0.0);
    CHECK(component_prox(inst, i, Vec{0.0}, 0.3)[0] == 0.0);
  }
  CHECK(average_smoothness_probe(inst, 200, 7) <= inst.L + 1e-12);
}

TEST_CASE("nc scalings and bounds") {
  const HardInstance inst = make_nc(100.0, 50.0, 4, 10.0, 5e-3);
  CHECK(inst.m >= 2);
  CHECK(inst.dim() == inst.m + 1);
  // the derived moduli respect the (-sigma, L) declaration
  const double l1 = 45.0 * (std::sqrt(3.0) - 1.0) * inst.L * inst.nc_alpha /
                    (3.0 * inst.n);
  const double l2 =
      inst.L / (3.0 * inst.n) * (2.0 * inst.n + 180.0 * inst.nc_alpha);
  CHECK(l1 <= inst.sigma);
  CHECK(l2 <= inst.L);
  // hardest-point normalization: the gradient floor equals 9 eps
  const double floor = std::pow(inst.nc_alpha, 0.75) * inst.nc_lambda /
                       (4.0 * inst.nc_beta);
  CHECK(floor == doctest::Approx(9.0 * inst.eps).epsilon(1e-12));
  // the lambda bound on the initial gap stays within Delta
  CHECK(inst.nc_lambda * (std::sqrt(inst.nc_alpha) / 2.0 +
                          10.0 * inst.nc_alpha * inst.m) <=
        inst.Delta * (1.0 + 1e-12));
  CHECK(gamma_well(1.0) == 0.0);
}

TEST_CASE("restricted minima") {
  const HardInstance sc = make_sc(40.0, 1.0, 5, 1.0, 1e-4);
  CHECK(restricted_gap(sc, sc.m) == 0.0);
  CHECK(restricted_gap(sc, 0) == doctest::Approx(sc.Delta));
  const double fstar_dense = full_value(sc, dense::dense_minimizer(sc));
  for (int k : {1, sc.m / 2, sc.m - 1}) {
    const double dense_gap =
        full_value(sc, dense::dense_restricted_minimizer(sc, k)) - fstar_dense;
    CHECK(restricted_gap(sc, k) == doctest::Approx(dense_gap).epsilon(1e-9));
    CHECK(restricted_gap(sc, k) >= sc.Delta * std::pow(sc.q, 2 * k));
  }

  const HardInstance c = make_c(10.0, 1.0, 4, 1e-3);
  const double slope = -c.xi * c.xi / (c.n * c.L);
  for (int k = 1; k <= c.m; ++k) {
    CHECK(restricted_gap(c, k) - restricted_gap(c, k - 1) ==
          doctest::Approx(slope).epsilon(1e-12));
  }
}

TEST_CASE("restricted distances") {
  const HardInstance sc = make_sc(40.0, 1.0, 5, 1.0, 1e-4);
  const auto [xstar, fstar] = minimizer(sc);
  CHECK(restricted_min_distance(sc, sc.m) == 0.0);
  // at depth 0 the restricted distance is the full distance to the minimizer
  double direct = 0.0;
  for (double v : xstar) direct += v * v;
  CHECK(restricted_min_distance(sc, 0) ==
        doctest::Approx(direct).epsilon(1e-12));
  const Certificate cert = certificate(sc, sc.eps);
  if (cert.M <= sc.m / 2) {
    CHECK(restricted_min_distance(sc, cert.M) /
              restricted_min_distance(sc, 0) >=
          0.5 * std::pow(sc.q, 2 * cert.M));
  }
  CHECK_THROWS_AS(restricted_min_distance(make_c(10.0, 1.0, 4, 1e-3), 1),
                  domain_error);
}

TEST_CASE("certificates") {
  const HardInstance sc = make_sc(10.0, 1.0, 4, 1.0, 1e-4);
  const Certificate cert = certificate(sc, sc.eps);
  CHECK(cert.M >= 1);
  CHECK(cert.M < sc.m);
  CHECK(cert.gap_at_M >= 9.0 * sc.eps);
  CHECK(sc.Delta * std::pow(sc.q, 2 * cert.M) >= 9.0 * sc.eps);
  CHECK(cert.N == sc.n * (cert.M + 1) / 4);

  const HardInstance c = make_c(10.0, 1.0, 4, 1e-3);
  const Certificate cc = certificate(c, c.eps);
  CHECK(cc.M == (c.m - 1) / 2);
  CHECK(cc.gap_at_M >=
        3.0 * c.Bdist * c.Bdist * c.L / (8.0 * c.n * (c.m + 1.0) * (c.m + 1.0)) -
            1e-12);
  CHECK(cc.gap_at_M >= 9.0 * c.eps);

  const HardInstance nc = make_nc(100.0, 50.0, 4, 10.0, 5e-3);
  const Certificate cn = certificate(nc, nc.eps);
  CHECK(cn.M == nc.m - 1);
  CHECK(cn.gap_at_M >= 9.0 * nc.eps * (1.0 - 1e-12));

  CHECK_THROWS_AS(certificate(make_one_d(10.0, 1.0, 4), 1e-3), domain_error);
}

TEST_CASE("constructor preconditions carry the violated constraint") {
  try {
    make_sc(2.0, 1.0, 4, 1.0, 1e-4);  // kappa = 2 < n/2 + 1 = 3
    FAIL("expected a domain error");
  } catch (const domain_error& e) {
    CHECK(std::string(e.what()).find("n/2 + 1") != std::string::npos);
  }
  try {
    make_c(10.0, 1.0, 4, 0.1);  // above B^2 L / (384 n)
    FAIL("expected a domain error");
  } catch (const domain_error& e) {
    CHECK(std::string(e.what()).find("one_d") != std::string::npos);
  }
}

TEST_CASE("serialization reproduces bit-identical scalars") {
  for (const HardInstance& inst :
       {make_sc(10.0, 1.0, 4, 1.0, 1e-4), make_c(10.0, 1.0, 4, 1e-3),
        make_avg_sc(20.0, 1.0, 4, 1.0, 1e-4), make_one_d(10.0, 1.0, 4),
        make_nc(100.0, 50.0, 4, 10.0, 5e-3)}) {
    const HardInstance back = instance_from_json(instance_to_json(inst));
    const auto bits_equal = [](double a, double b) {
      return std::memcmp(&a, &b, sizeof a) == 0;
    };
    CHECK(back.family == inst.family);
    CHECK(back.m == inst.m);
    CHECK(back.n == inst.n);
    CHECK(bits_equal(back.L, inst.L));
    CHECK(bits_equal(back.lambda0, inst.lambda0));
    CHECK(bits_equal(back.lambda1, inst.lambda1));
    CHECK(bits_equal(back.omega, inst.omega));
    CHECK(bits_equal(back.q, inst.q));
    CHECK(bits_equal(back.xi, inst.xi));
    CHECK(bits_equal(back.nc_beta, inst.nc_beta));
    // oracle replies agree exactly after the round trip
    if (inst.family != Family::ONE_D) {
      Rng rng(99);
      const Vec x = rng.normal_vec(inst.dim());
      CHECK(component_value(inst, 1, x) == component_value(back, 1, x));
    }
  }
}
