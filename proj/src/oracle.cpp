#include "pifo/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "pifo/errors.hpp"
#include "pifo/nonconvex.hpp"

namespace pifo {

namespace {

void check_call(const HardInstance& inst, int i, const Vec& x) {
  if (i < 1 || i > inst.n) throw std::out_of_range("component index out of range");
  if (static_cast<int>(x.size()) != inst.dim())
    throw std::invalid_argument("vector dimension does not match instance");
}

// linear coefficient of component i: lambda0 on component 1, zero otherwise
double eta(const HardInstance& inst, int i) {
  if (inst.family == Family::NC) {
    return i == 1 ? inst.nc_lambda * inst.n * std::sqrt(inst.nc_alpha) / inst.nc_beta
                  : 0.0;
  }
  return i == 1 ? inst.lambda0 : 0.0;
}

// --- NC prox: the stationarity system splits into scalar blocks and 2x2
// blocks because rows within a group have disjoint supports. Every block
// subproblem is strictly convex whenever gamma is inside its validity range,
// so each block has a unique solution.

struct NcCoefs {
  double kq;    // row quadratic coefficient, lambda n / beta^2
  double kg;    // bump gradient coefficient, lambda alpha / beta
  double beta;
  double a;     // 1/gamma
};

double scalar_residual(const NcCoefs& c, double qcoef, bool bump, double rhs,
                       double u) {
  double r = (qcoef + c.a) * u - rhs;
  if (bump) r += c.kg * gamma_well_d1(u / c.beta);
  return r;
}

double scalar_slope(const NcCoefs& c, double qcoef, bool bump, double u) {
  double s = qcoef + c.a;
  if (bump) s += c.kg / c.beta * gamma_well_d2(u / c.beta);
  return s;
}

// Monotone scalar root find: bracket by sign scan, then Newton safeguarded by
// bisection. qcoef adds any extra quadratic term (the corner row).
double solve_scalar_block(const NcCoefs& c, double qcoef, bool bump, double rhs) {
  if (rhs == 0.0) return 0.0;  // residual at zero is exactly zero
  const double tol =
      1e-13 * (std::abs(rhs) + (c.a + qcoef) * c.beta + c.kg);
  // initial sign scan over +-10 beta-scaled units around the linear solution
  const double u_lin = rhs / (qcoef + c.a);
  double step = 10.0 * std::max(c.beta, std::abs(u_lin));
  double lo = u_lin - step, hi = u_lin + step;
  for (int tries = 0; scalar_residual(c, qcoef, bump, rhs, lo) > 0.0 && tries < 64;
       ++tries) {
    lo -= step;
    step *= 2.0;
  }
  step = 10.0 * std::max(c.beta, std::abs(u_lin));
  for (int tries = 0; scalar_residual(c, qcoef, bump, rhs, hi) < 0.0 && tries < 64;
       ++tries) {
    hi += step;
    step *= 2.0;
  }
  double u = u_lin;
  for (int it = 0; it < 200; ++it) {
    const double r = scalar_residual(c, qcoef, bump, rhs, u);
    if (std::abs(r) <= tol) return u;
    if (r > 0.0) hi = u; else lo = u;
    const double d = scalar_slope(c, qcoef, bump, u);
    double next = u - r / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    u = next;
  }
  throw numeric_error("scalar prox block did not converge");
}

// 2x2 block: Newton with backtracking on the residual norm. The Jacobian is
// symmetric positive definite inside the validity range, so the Newton
// direction always reduces the residual merit.
void solve_pair_block(const NcCoefs& c, bool bump0, bool bump1, double rhs0,
                      double rhs1, double& u0, double& u1) {
  if (rhs0 == 0.0 && rhs1 == 0.0) {
    u0 = u1 = 0.0;
    return;
  }
  const double tol =
      1e-13 * (std::abs(rhs0) + std::abs(rhs1) + (c.a + c.kq) * c.beta + c.kg);
  const auto residual = [&](double v0, double v1, double& g0, double& g1) {
    g0 = c.kq * (v0 - v1) + c.a * v0 - rhs0 +
         (bump0 ? c.kg * gamma_well_d1(v0 / c.beta) : 0.0);
    g1 = c.kq * (v1 - v0) + c.a * v1 - rhs1 +
         (bump1 ? c.kg * gamma_well_d1(v1 / c.beta) : 0.0);
    return g0 * g0 + g1 * g1;
  };
  // start from the solve without the bump terms
  {
    const double a11 = c.kq + c.a, det = a11 * a11 - c.kq * c.kq;
    u0 = (a11 * rhs0 + c.kq * rhs1) / det;
    u1 = (c.kq * rhs0 + a11 * rhs1) / det;
  }
  double g0, g1;
  double merit = residual(u0, u1, g0, g1);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(g0) <= tol && std::abs(g1) <= tol) return;
    const double h00 = c.kq + c.a +
                       (bump0 ? c.kg / c.beta * gamma_well_d2(u0 / c.beta) : 0.0);
    const double h11 = c.kq + c.a +
                       (bump1 ? c.kg / c.beta * gamma_well_d2(u1 / c.beta) : 0.0);
    const double h01 = -c.kq;
    const double det = h00 * h11 - h01 * h01;
    const double d0 = -(h11 * g0 - h01 * g1) / det;
    const double d1 = -(h00 * g1 - h01 * g0) / det;
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      double t0, t1;
      if (residual(u0 + t * d0, u1 + t * d1, t0, t1) <=
          merit * (1.0 - 1e-4 * t))
        break;
      t *= 0.5;
    }
    u0 += t * d0;
    u1 += t * d1;
    merit = residual(u0, u1, g0, g1);
  }
  throw numeric_error("pair prox block did not converge");
}

Vec nc_prox(const HardInstance& inst, int i, const Vec& x, double gamma) {
  const double limit = prox_gamma_limit(inst);
  if (!(gamma < limit * (1.0 - 1e-12)))
    throw domain_error(
        "nc prox requires gamma < (sqrt(3)+1)/90 * beta^2 / (lambda alpha)");
  const int dim = inst.dim();
  NcCoefs c;
  c.kq = inst.nc_lambda * inst.n / (inst.nc_beta * inst.nc_beta);
  c.kg = inst.nc_lambda * inst.nc_alpha / inst.nc_beta;
  c.beta = inst.nc_beta;
  c.a = 1.0 / gamma;

  Vec y(dim);
  for (int j = 0; j < dim; ++j) y[j] = x[j] / gamma;
  y[0] += eta(inst, i);

  Vec u(dim, 0.0);
  std::vector<char> covered(dim, 0);
  // coordinate j (0-based) carries a bump term iff j < m
  const auto has_bump = [&](int j) { return j < inst.m; };
  for (int l : inst.part.groups[i - 1]) {
    if (l == dim) {
      // corner row omega * e_1 adds a pure quadratic on coordinate 1
      const double w2 = inst.omega * inst.omega;
      u[0] = solve_scalar_block(c, c.kq * w2, has_bump(0), y[0]);
      covered[0] = 1;
    } else {
      const int s0 = dim - l - 1, s1 = dim - l;
      solve_pair_block(c, has_bump(s0), has_bump(s1), y[s0], y[s1], u[s0], u[s1]);
      covered[s0] = covered[s1] = 1;
    }
  }
  for (int j = 0; j < dim; ++j) {
    if (covered[j]) continue;
    if (!has_bump(j)) {
      u[j] = gamma * y[j];  // plain quadratic: exact
    } else {
      u[j] = solve_scalar_block(c, 0.0, true, y[j]);
    }
  }
  return u;
}

}  // namespace

double component_value(const HardInstance& inst, int i, const Vec& x) {
  check_call(inst, i, x);
  switch (inst.family) {
    case Family::ONE_D: {
      const double v = 0.5 * inst.L * x[0] * x[0];
      return i == 1 ? v - inst.n * inst.L * inst.Bdist * x[0] : v;
    }
    case Family::NC: {
      double quad = 0.0;
      for (int l : inst.part.groups[i - 1]) {
        const double r = row_dot(inst.band, l, x);
        quad += r * r;
      }
      double bump = 0.0;
      for (int j = 0; j < inst.m; ++j) bump += gamma_well(x[j] / inst.nc_beta);
      return 0.5 * inst.nc_lambda * inst.n / (inst.nc_beta * inst.nc_beta) * quad -
             eta(inst, i) * x[0] + inst.nc_lambda * inst.nc_alpha * bump;
    }
    default: {
      double quad = 0.0;
      for (int l : inst.part.groups[i - 1]) {
        const double r = row_dot(inst.band, l, x);
        quad += r * r;
      }
      return inst.lambda1 * quad + inst.lambda2 * dot(x, x) -
             eta(inst, i) * x[inst.m - 1];
    }
  }
}

Vec component_gradient(const HardInstance& inst, int i, const Vec& x) {
  check_call(inst, i, x);
  switch (inst.family) {
    case Family::ONE_D: {
      Vec g{inst.L * x[0]};
      if (i == 1) g[0] -= inst.n * inst.L * inst.Bdist;
      return g;
    }
    case Family::NC: {
      Vec g = apply_group_gram(inst.band, inst.part, i, x);
      const double kq = inst.nc_lambda * inst.n / (inst.nc_beta * inst.nc_beta);
      scale(g, kq);
      const double kg = inst.nc_lambda * inst.nc_alpha / inst.nc_beta;
      for (int j = 0; j < inst.m; ++j)
        g[j] += kg * gamma_well_d1(x[j] / inst.nc_beta);
      g[0] -= eta(inst, i);
      return g;
    }
    default: {
      Vec g = apply_group_gram(inst.band, inst.part, i, x);
      scale(g, 2.0 * inst.lambda1);
      if (inst.lambda2 != 0.0) axpy(2.0 * inst.lambda2, x, g);
      g[inst.m - 1] -= eta(inst, i);
      return g;
    }
  }
}

Vec component_prox(const HardInstance& inst, int i, const Vec& x, double gamma) {
  check_call(inst, i, x);
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  switch (inst.family) {
    case Family::ONE_D: {
      const double num =
          (i == 1 ? inst.n * inst.L * inst.Bdist * gamma : 0.0) + x[0];
      return Vec{num / (inst.L * gamma + 1.0)};
    }
    case Family::NC:
      return nc_prox(inst, i, x, gamma);
    default: {
      // (2 lambda1 B_i^T B_i + (2 lambda2 + 1/gamma) I) u = eta_i e_m + x/gamma
      const double c = 2.0 * inst.lambda2 + 1.0 / gamma;
      Vec y(inst.m);
      for (int j = 0; j < inst.m; ++j) y[j] = x[j] / gamma;
      y[inst.m - 1] += eta(inst, i);
      Vec u = solve_shifted_group_gram(inst.band, inst.part, i,
                                       2.0 * inst.lambda1 / c, y);
      scale(u, 1.0 / c);
      return u;
    }
  }
}

OracleReply pifo_call(const HardInstance& inst, int i, const Vec& x,
                      double gamma, QueryCounter* counter) {
  OracleReply reply;
  reply.value = component_value(inst, i, x);
  reply.gradient = component_gradient(inst, i, x);
  reply.prox_point = component_prox(inst, i, x, gamma);
  reply.gamma = gamma;
  if (counter) counter->bump();
  return reply;
}

double full_value(const HardInstance& inst, const Vec& x) {
  check_call(inst, 1, x);
  switch (inst.family) {
    case Family::ONE_D:
      return 0.5 * inst.L * x[0] * x[0] - inst.L * inst.Bdist * x[0];
    case Family::NC: {
      double quad = 0.0;
      for (int l = 1; l <= inst.band.m; ++l) {
        const double r = row_dot(inst.band, l, x);
        quad += r * r;
      }
      double bump = 0.0;
      for (int j = 0; j < inst.m; ++j) bump += gamma_well(x[j] / inst.nc_beta);
      const double b2 = inst.nc_beta * inst.nc_beta;
      return inst.nc_lambda * (0.5 * quad / b2 -
                               std::sqrt(inst.nc_alpha) * x[0] / inst.nc_beta +
                               inst.nc_alpha * bump);
    }
    default: {
      double quad = 0.0;
      for (int l = 1; l <= inst.band.m; ++l) {
        const double r = row_dot(inst.band, l, x);
        quad += r * r;
      }
      return inst.lambda1 / inst.n * quad + inst.lambda2 * dot(x, x) -
             inst.lambda0 / inst.n * x[inst.m - 1];
    }
  }
}

Vec full_gradient(const HardInstance& inst, const Vec& x) {
  check_call(inst, 1, x);
  switch (inst.family) {
    case Family::ONE_D:
      return Vec{inst.L * x[0] - inst.L * inst.Bdist};
    case Family::NC: {
      Vec g(x.size(), 0.0);
      for (int l = 1; l <= inst.band.m; ++l) {
        const double r = row_dot(inst.band, l, x);
        if (r != 0.0) row_axpy(inst.band, l, r, g);
      }
      const double b2 = inst.nc_beta * inst.nc_beta;
      scale(g, inst.nc_lambda / b2);
      const double kg = inst.nc_lambda * inst.nc_alpha / inst.nc_beta;
      for (int j = 0; j < inst.m; ++j)
        g[j] += kg * gamma_well_d1(x[j] / inst.nc_beta);
      g[0] -= inst.nc_lambda * std::sqrt(inst.nc_alpha) / inst.nc_beta;
      return g;
    }
    default: {
      Vec g(x.size(), 0.0);
      for (int l = 1; l <= inst.band.m; ++l) {
        const double r = row_dot(inst.band, l, x);
        if (r != 0.0) row_axpy(inst.band, l, r, g);
      }
      scale(g, 2.0 * inst.lambda1 / inst.n);
      if (inst.lambda2 != 0.0) axpy(2.0 * inst.lambda2, x, g);
      g[inst.m - 1] -= inst.lambda0 / inst.n;
      return g;
    }
  }
}

}  // namespace pifo
