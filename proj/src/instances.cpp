#include "pifo/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include <json.hpp>

#include "pifo/errors.hpp"
#include "pifo/nonconvex.hpp"

namespace pifo {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kSqrt3 = 1.7320508075688772935274463415059;

// (1/9) ((sqrt2-1)/(sqrt2+1))^2, the eps/Delta ceiling of the SC regime.
double sc_eps_ratio_limit() {
  const double r = (kSqrt2 - 1.0) / (kSqrt2 + 1.0);
  return r * r / 9.0;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw domain_error(msg);
}

void finish_band(HardInstance& inst, int band_dim) {
  inst.band.m = band_dim;
  inst.band.omega = inst.omega;
  inst.band.n = inst.n;
  inst.part = inst.orient == Orientation::tail ? partition_rows(inst.band)
                                               : partition_rows_head(inst.band);
}

HardInstance build_sc_like(Family family, double L, double mu, int n,
                           double Delta, double eps, int m) {
  HardInstance inst;
  inst.family = family;
  inst.orient = Orientation::tail;
  inst.n = n;
  inst.m = m;
  inst.L = L;
  inst.mu = mu;
  inst.Delta = Delta;
  inst.eps = eps;
  inst.alpha = std::sqrt(2.0 * (L / mu - 1.0) / n + 1.0);
  inst.q = (inst.alpha - 1.0) / (inst.alpha + 1.0);
  inst.omega = std::sqrt(2.0 / (inst.alpha + 1.0));
  inst.lambda1 = (L - mu) / 4.0;
  inst.lambda2 = mu / 2.0;
  inst.lambda0 = std::sqrt(2.0 * (L - mu) * n * Delta / (inst.alpha - 1.0));
  inst.xi = std::sqrt(2.0 * Delta * n * (inst.alpha + 1.0) * (inst.alpha + 1.0) /
                      ((L - mu) * (inst.alpha - 1.0)));
  finish_band(inst, m);
  return inst;
}

HardInstance build_c_like(Family family, double L, double Bdist, int n,
                          double eps, int m) {
  HardInstance inst;
  inst.family = family;
  inst.orient = Orientation::tail;
  inst.n = n;
  inst.m = m;
  inst.L = L;
  inst.mu = 0.0;
  inst.Bdist = Bdist;
  inst.eps = eps;
  inst.omega = 1.0;
  inst.lambda1 = L / 4.0;
  inst.lambda2 = 0.0;
  inst.lambda0 = 0.5 * kSqrt3 * Bdist * L / std::pow(m + 1.0, 1.5);
  inst.xi = inst.lambda0;
  finish_band(inst, m);
  return inst;
}

int sc_chain_length(double alpha_like, double Delta, double eps) {
  const double raw = 0.25 * alpha_like * std::log(Delta / (9.0 * eps)) + 1.0;
  const int m = static_cast<int>(std::ceil(raw));
  return m < 2 ? 2 : m;
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::SC: return "sc";
    case Family::C: return "c";
    case Family::AVG_SC: return "avg_sc";
    case Family::AVG_C: return "avg_c";
    case Family::ONE_D: return "one_d";
    case Family::NC: return "nc";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "sc") return Family::SC;
  if (name == "c") return Family::C;
  if (name == "avg_sc") return Family::AVG_SC;
  if (name == "avg_c") return Family::AVG_C;
  if (name == "one_d") return Family::ONE_D;
  if (name == "nc") return Family::NC;
  throw domain_error("unknown family '" + name + "'");
}

int HardInstance::dim() const {
  switch (family) {
    case Family::ONE_D: return 1;
    case Family::NC: return m + 1;
    default: return m;
  }
}

bool HardInstance::is_quadratic() const {
  return family == Family::SC || family == Family::C ||
         family == Family::AVG_SC || family == Family::AVG_C;
}

HardInstance make_sc(double L, double mu, int n, double Delta, double eps) {
  require(n >= 2, "sc family requires n >= 2");
  require(mu > 0.0 && L > mu, "sc family requires L > mu > 0");
  require(Delta > 0.0 && eps > 0.0, "sc family requires Delta > 0 and eps > 0");
  require(L / mu >= n / 2.0 + 1.0,
          "sc family requires condition number L/mu >= n/2 + 1");
  require(eps / Delta <= sc_eps_ratio_limit(),
          "sc family requires eps/Delta <= (1/9)((sqrt(2)-1)/(sqrt(2)+1))^2 "
          "~= 0.00327");
  const double alpha = std::sqrt(2.0 * (L / mu - 1.0) / n + 1.0);
  return build_sc_like(Family::SC, L, mu, n, Delta, eps,
                       sc_chain_length(alpha, Delta, eps));
}

HardInstance make_c(double L, double Bdist, int n, double eps) {
  require(n >= 2, "c family requires n >= 2");
  require(L > 0.0 && Bdist > 0.0 && eps > 0.0,
          "c family requires L, B, eps > 0");
  require(eps <= Bdist * Bdist * L / (384.0 * n),
          "c family requires eps <= B^2 L / (384 n); for larger eps use the "
          "one_d family");
  const int m =
      static_cast<int>(std::floor(std::sqrt(Bdist * Bdist * L / (24.0 * n * eps)))) - 1;
  require(m >= 3, "c family sizing produced m < 3");  // implied by the eps bound
  return build_c_like(Family::C, L, Bdist, n, eps, m);
}

HardInstance make_avg_sc(double Lavg, double mu, int n, double Delta,
                         double eps) {
  require(n >= 2, "avg_sc family requires n >= 2");
  require(mu > 0.0 && Lavg > mu, "avg_sc family requires Lavg > mu > 0");
  require(Lavg / mu >= std::sqrt(3.0 / n) * (n / 2.0 + 1.0),
          "avg_sc family requires Lavg/mu >= sqrt(3/n) (n/2 + 1)");
  require(eps > 0.0 && Delta > 0.0,
          "avg_sc family requires Delta > 0 and eps > 0");
  require(eps / Delta <= sc_eps_ratio_limit(),
          "avg_sc family requires eps/Delta <= (1/9)((sqrt(2)-1)/(sqrt(2)+1))^2 "
          "~= 0.00327");
  const double L = std::sqrt(n * (Lavg * Lavg - mu * mu) / 2.0 - mu * mu);
  const double alpha_like = std::sqrt(std::sqrt(2.0 / n) * Lavg / mu + 1.0);
  HardInstance inst = build_sc_like(Family::AVG_SC, L, mu, n, Delta, eps,
                                    sc_chain_length(alpha_like, Delta, eps));
  inst.Lavg = Lavg;
  return inst;
}

HardInstance make_avg_c(double Lavg, double Bdist, int n, double eps) {
  require(n >= 2, "avg_c family requires n >= 2");
  require(Lavg > 0.0 && Bdist > 0.0 && eps > 0.0,
          "avg_c family requires Lavg, B, eps > 0");
  require(eps <= kSqrt2 / 768.0 * Bdist * Bdist * Lavg / std::sqrt(double(n)),
          "avg_c family requires eps <= (sqrt(2)/768) B^2 Lavg / sqrt(n); for "
          "larger eps use the one_d family");
  const double L = std::sqrt(n / 2.0) * Lavg;
  const int m =
      static_cast<int>(std::floor(std::sqrt(Bdist * Bdist * L / (24.0 * n * eps)))) - 1;
  HardInstance inst = build_c_like(Family::AVG_C, L, Bdist, n, eps, m);
  inst.Lavg = Lavg;
  return inst;
}

HardInstance make_one_d(double L, double Bdist, int n) {
  require(n >= 2, "one_d family requires n >= 2");
  require(L > 0.0 && Bdist > 0.0, "one_d family requires L, B > 0");
  HardInstance inst;
  inst.family = Family::ONE_D;
  inst.orient = Orientation::tail;
  inst.n = n;
  inst.m = 1;
  inst.L = L;
  inst.Lavg = L;
  inst.Bdist = Bdist;
  inst.band.m = 1;
  inst.band.omega = 0.0;
  inst.band.n = n;
  return inst;
}

HardInstance make_nc(double L, double sigma, int n, double Delta, double eps) {
  require(n >= 2, "nc family requires n >= 2");
  require(L > 0.0 && sigma > 0.0 && Delta > 0.0 && eps > 0.0,
          "nc family requires L, sigma, Delta, eps > 0");
  const double alpha =
      std::min({1.0, (kSqrt3 + 1.0) * n * sigma / (30.0 * L), n / 180.0});
  require(eps * eps <= Delta * L * alpha / (81648.0 * n),
          "nc family requires eps^2 <= Delta L alpha / (81648 n) with alpha = "
          "min{1, (sqrt(3)+1) n sigma/(30 L), n/180}");
  HardInstance inst;
  inst.family = Family::NC;
  inst.orient = Orientation::head;
  inst.n = n;
  inst.L = L;
  inst.sigma = sigma;
  inst.Delta = Delta;
  inst.eps = eps;
  inst.nc_alpha = alpha;
  inst.nc_lambda = 3888.0 * n * eps * eps / (L * std::pow(alpha, 1.5));
  inst.nc_beta = std::sqrt(3.0 * inst.nc_lambda * n / L);
  inst.m = static_cast<int>(
      std::floor(Delta * L * std::sqrt(alpha) / (40824.0 * n * eps * eps)));
  inst.omega = std::pow(alpha, 0.25);
  finish_band(inst, inst.m + 1);
  return inst;
}

std::pair<Vec, double> minimizer(const HardInstance& inst) {
  switch (inst.family) {
    case Family::SC:
    case Family::AVG_SC: {
      Vec x(inst.m);
      // coordinate j (1-based) carries xi * q^{m-j+1}
      for (int j = 1; j <= inst.m; ++j)
        x[j - 1] = inst.xi * std::pow(inst.q, inst.m - j + 1);
      return {std::move(x), -inst.Delta};
    }
    case Family::C:
    case Family::AVG_C: {
      Vec x(inst.m);
      for (int j = 1; j <= inst.m; ++j) x[j - 1] = 2.0 * inst.xi / inst.L * j;
      const double fstar = -inst.m * inst.xi * inst.xi / (inst.n * inst.L);
      return {std::move(x), fstar};
    }
    case Family::ONE_D: {
      // G(x) = (L/2) x^2 - L B x, minimized at B.
      const double b = inst.Bdist;
      return {Vec{b}, -0.5 * inst.L * b * b};
    }
    case Family::NC:
      throw domain_error(
          "nc family has no closed-form minimizer; its minimum is only "
          "bounded");
  }
  throw domain_error("unreachable family");
}

double restricted_gap(const HardInstance& inst, int k) {
  if (k < 0 || k > inst.m) throw std::out_of_range("subspace depth out of range");
  switch (inst.family) {
    case Family::SC:
    case Family::AVG_SC: {
      if (k == inst.m) return 0.0;
      const double qk = std::pow(inst.q, 2 * k);
      return inst.Delta * qk * (1.0 + inst.q) /
             (1.0 + qk * inst.q);  // q^{2k+1} = q^{2k} * q
    }
    case Family::C:
    case Family::AVG_C:
      return inst.xi * inst.xi * (inst.m - k) / (inst.n * inst.L);
    case Family::ONE_D:
      return k >= 1 ? 0.0 : 0.5 * inst.L * inst.Bdist * inst.Bdist;
    case Family::NC:
      throw domain_error("nc family has no restricted minimum value");
  }
  throw domain_error("unreachable family");
}

double restricted_min(const HardInstance& inst, int k) {
  return restricted_gap(inst, k) + minimizer(inst).second;
}

double restricted_min_distance(const HardInstance& inst, int k) {
  if (inst.family != Family::SC && inst.family != Family::AVG_SC)
    throw domain_error("restricted distance requires a strongly convex family");
  if (k < 0 || k > inst.m) throw std::out_of_range("subspace depth out of range");
  const double q2 = inst.q * inst.q;
  const double num = std::pow(q2, k + 1) - std::pow(q2, inst.m + 1);
  return inst.xi * inst.xi * num / (1.0 - q2);
}

Certificate certificate(const HardInstance& inst, double eps) {
  require(eps > 0.0, "certificate requires eps > 0");
  Certificate cert;
  switch (inst.family) {
    case Family::SC:
    case Family::AVG_SC: {
      cert.M = static_cast<int>(
          std::floor(std::log(9.0 * eps / inst.Delta) / (2.0 * std::log(inst.q))));
      require(cert.M >= 1,
              "certificate regime requires eps <= Delta q^2 / 9 so that M >= 1");
      require(cert.M < inst.m,
              "certificate regime requires M < m; eps is too small for this "
              "instance's dimension");
      cert.gap_at_M = restricted_gap(inst, cert.M);
      break;
    }
    case Family::C:
    case Family::AVG_C: {
      cert.M = (inst.m - 1) / 2;
      require(cert.M >= 1, "certificate requires m >= 3");
      cert.gap_at_M = restricted_gap(inst, cert.M);
      require(cert.gap_at_M >= 9.0 * eps,
              "certificate regime requires the gap at M = floor((m-1)/2) to be "
              ">= 9 eps");
      break;
    }
    case Family::NC: {
      cert.M = inst.m - 1;
      require(cert.M >= 1, "certificate requires m >= 2");
      // gradient-norm floor on the depth-M subspace
      cert.gap_at_M = std::pow(inst.nc_alpha, 0.75) * inst.nc_lambda /
                      (4.0 * inst.nc_beta);
      require(cert.gap_at_M >= 9.0 * eps * (1.0 - 1e-12),
              "certificate regime requires the gradient floor to be >= 9 eps");
      break;
    }
    case Family::ONE_D:
      throw domain_error(
          "one_d family has no subspace certificate; its budget depends on the "
          "sampling scheme (first draw of component 1)");
  }
  if (inst.family != Family::NC)
    require(cert.gap_at_M >= 9.0 * eps * (1.0 - 1e-12),
            "certified gap fell below 9 eps");
  cert.N = static_cast<long long>(inst.n) * (cert.M + 1) / 4;
  return cert;
}

int extender_component(const HardInstance& inst, int k) {
  if (inst.family == Family::ONE_D) return 1;
  // depth k is fed by component i = k+1 (mod n) in both orientations: at
  // k = 0 through the linear term of component 1, afterwards through the one
  // row whose support straddles the subspace boundary
  return (k % inst.n) + 1;
}

double prox_gamma_limit(const HardInstance& inst) {
  if (inst.family != Family::NC)
    return std::numeric_limits<double>::infinity();
  // validity of the prox subproblem: 1/gamma must exceed the weak-convexity
  // modulus 45(sqrt3-1) alpha lambda / beta^2
  return (kSqrt3 + 1.0) / 90.0 * inst.nc_beta * inst.nc_beta /
         (inst.nc_lambda * inst.nc_alpha);
}

namespace {

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

struct ScalarField {
  const char* name;
  double HardInstance::*member;
};

constexpr ScalarField kScalars[] = {
    {"L", &HardInstance::L},           {"mu", &HardInstance::mu},
    {"l_avg", &HardInstance::Lavg},    {"delta", &HardInstance::Delta},
    {"b_dist", &HardInstance::Bdist},  {"eps", &HardInstance::eps},
    {"lambda0", &HardInstance::lambda0}, {"lambda1", &HardInstance::lambda1},
    {"lambda2", &HardInstance::lambda2}, {"omega", &HardInstance::omega},
    {"alpha", &HardInstance::alpha},   {"q", &HardInstance::q},
    {"xi", &HardInstance::xi},         {"sigma", &HardInstance::sigma},
    {"nc_alpha", &HardInstance::nc_alpha}, {"nc_lambda", &HardInstance::nc_lambda},
    {"nc_beta", &HardInstance::nc_beta},
};

}  // namespace

std::string instance_to_json(const HardInstance& inst) {
  nlohmann::json j;
  j["family"] = family_name(inst.family);
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["dim"] = inst.dim();
  j["orientation"] = inst.orient == Orientation::tail ? "tail" : "head";
  nlohmann::json scalars;
  nlohmann::json display;
  for (const auto& f : kScalars) {
    scalars[f.name] = hex_double(inst.*(f.member));
    display[f.name] = inst.*(f.member);
  }
  j["scalars"] = scalars;
  j["display"] = display;  // informational; hex strings are authoritative
  return j.dump(2);
}

HardInstance instance_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  HardInstance inst;
  inst.family = family_from_name(j.at("family").get<std::string>());
  inst.n = j.at("n").get<int>();
  inst.m = j.at("m").get<int>();
  inst.orient = j.at("orientation").get<std::string>() == "tail"
                    ? Orientation::tail
                    : Orientation::head;
  const auto& scalars = j.at("scalars");
  for (const auto& f : kScalars)
    inst.*(f.member) = parse_hex(scalars.at(f.name).get<std::string>());
  if (inst.family == Family::ONE_D) {
    inst.band.m = 1;
    inst.band.omega = 0.0;
    inst.band.n = inst.n;
  } else {
    finish_band(inst, inst.dim());
  }
  return inst;
}

}  // namespace pifo
