#include "pifobench.h"

#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "pifo/analysis.hpp"
#include "pifo/errors.hpp"
#include "pifo/instances.hpp"
#include "pifo/oracle.hpp"
#include "pifo/solvers.hpp"
#include "pifo/verify.hpp"

struct pifo_instance_t {
  pifo::HardInstance inst;
};

struct pifo_trace_t {
  pifo::RunTrace trace;
  std::string algorithm;
  int n = 0;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

// Maps C++ exceptions onto status codes at the library boundary.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PIFO_OK;
  } catch (const pifo::domain_error& e) {
    return fail(PIFO_ERR_DOMAIN, e.what());
  } catch (const pifo::numeric_error& e) {
    return fail(PIFO_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(PIFO_ERR_INVALID, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int make_instance(pifo_instance_t** out, pifo::HardInstance inst) {
  *out = new pifo_instance_t{std::move(inst)};
  return PIFO_OK;
}

pifo::Vec to_vec(const double* x, size_t len) {
  return pifo::Vec(x, x + len);
}

}  // namespace

extern "C" {

const char* pifo_last_error(void) { return g_last_error.c_str(); }

void pifo_string_free(char* s) { delete[] s; }

int pifo_make_sc(double L, double mu, int n, double delta, double eps,
                 pifo_instance_t** out) {
  if (!out) return fail(PIFO_ERR_INVALID, "null output handle");
  return guarded([&] { make_instance(out, pifo::make_sc(L, mu, n, delta, eps)); });
}

int pifo_make_c(double L, double b_dist, int n, double eps,
                pifo_instance_t** out) {
  if (!out) return fail(PIFO_ERR_INVALID, "null output handle");
  return guarded([&] { make_instance(out, pifo::make_c(L, b_dist, n, eps)); });
}

int pifo_make_avg_sc(double l_avg, double mu, int n, double delta, double eps,
                     pifo_instance_t** out) {
  if (!out) return fail(PIFO_ERR_INVALID, "null output handle");
  return guarded(
      [&] { make_instance(out, pifo::make_avg_sc(l_avg, mu, n, delta, eps)); });
}

int pifo_make_avg_c(double l_avg, double b_dist, int n, double eps,
                    pifo_instance_t** out) {
  if (!out) return fail(PIFO_ERR_INVALID, "null output handle");
  return guarded(
      [&] { make_instance(out, pifo::make_avg_c(l_avg, b_dist, n, eps)); });
}

int pifo_make_one_d(double L, double b_dist, int n, pifo_instance_t** out) {
  if (!out) return fail(PIFO_ERR_INVALID, "null output handle");
  return guarded([&] { make_instance(out, pifo::make_one_d(L, b_dist, n)); });
}

int pifo_make_nc(double L, double sigma, int n, double delta, double eps,
                 pifo_instance_t** out) {
  if (!out) return fail(PIFO_ERR_INVALID, "null output handle");
  return guarded(
      [&] { make_instance(out, pifo::make_nc(L, sigma, n, delta, eps)); });
}

int pifo_instance_to_json(const pifo_instance_t* inst, char** json_out) {
  if (!inst || !json_out) return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] { *json_out = dup_string(pifo::instance_to_json(inst->inst)); });
}

int pifo_instance_from_json(const char* json, pifo_instance_t** out) {
  if (!json || !out) return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] { make_instance(out, pifo::instance_from_json(json)); });
}

void pifo_instance_free(pifo_instance_t* inst) { delete inst; }

int pifo_instance_dim(const pifo_instance_t* inst) {
  return inst ? inst->inst.dim() : 0;
}

int pifo_instance_components(const pifo_instance_t* inst) {
  return inst ? inst->inst.n : 0;
}

const char* pifo_instance_family(const pifo_instance_t* inst) {
  return inst ? pifo::family_name(inst->inst.family) : "";
}

int pifo_instance_scalar(const pifo_instance_t* inst, const char* name,
                         double* out) {
  if (!inst || !name || !out) return fail(PIFO_ERR_INVALID, "null argument");
  const std::string key = name;
  const pifo::HardInstance& hi = inst->inst;
  if (key == "L") *out = hi.L;
  else if (key == "mu") *out = hi.mu;
  else if (key == "l_avg") *out = hi.Lavg;
  else if (key == "delta") *out = hi.Delta;
  else if (key == "b_dist") *out = hi.Bdist;
  else if (key == "eps") *out = hi.eps;
  else if (key == "lambda0") *out = hi.lambda0;
  else if (key == "lambda1") *out = hi.lambda1;
  else if (key == "lambda2") *out = hi.lambda2;
  else if (key == "omega") *out = hi.omega;
  else if (key == "alpha") *out = hi.alpha;
  else if (key == "q") *out = hi.q;
  else if (key == "xi") *out = hi.xi;
  else if (key == "sigma") *out = hi.sigma;
  else if (key == "nc_alpha") *out = hi.nc_alpha;
  else if (key == "nc_lambda") *out = hi.nc_lambda;
  else if (key == "nc_beta") *out = hi.nc_beta;
  else if (key == "gamma_limit") *out = pifo::prox_gamma_limit(hi);
  else if (key == "m") *out = hi.m;
  else return fail(PIFO_ERR_INVALID, "unknown scalar name");
  g_last_error.clear();
  return PIFO_OK;
}

int pifo_minimizer(const pifo_instance_t* inst, double* x_star, double* f_star) {
  if (!inst) return fail(PIFO_ERR_INVALID, "null instance");
  return guarded([&] {
    const auto [x, f] = pifo::minimizer(inst->inst);
    if (x_star) std::memcpy(x_star, x.data(), x.size() * sizeof(double));
    if (f_star) *f_star = f;
  });
}

int pifo_certificate(const pifo_instance_t* inst, double eps, int* m_depth,
                     int64_t* n_queries, double* gap) {
  if (!inst) return fail(PIFO_ERR_INVALID, "null instance");
  return guarded([&] {
    const pifo::Certificate cert = pifo::certificate(inst->inst, eps);
    if (m_depth) *m_depth = cert.M;
    if (n_queries) *n_queries = cert.N;
    if (gap) *gap = cert.gap_at_M;
  });
}

int pifo_oracle(const pifo_instance_t* inst, int component, const double* x,
                size_t len, double gamma, double* value, double* grad,
                double* prox) {
  if (!inst || !x) return fail(PIFO_ERR_INVALID, "null argument");
  if (len != static_cast<size_t>(inst->inst.dim()))
    return fail(PIFO_ERR_INVALID, "vector length does not match instance");
  return guarded([&] {
    const pifo::Vec xv = to_vec(x, len);
    if (value) *value = pifo::component_value(inst->inst, component, xv);
    if (grad) {
      const pifo::Vec g = pifo::component_gradient(inst->inst, component, xv);
      std::memcpy(grad, g.data(), g.size() * sizeof(double));
    }
    if (prox) {
      const pifo::Vec p = pifo::component_prox(inst->inst, component, xv, gamma);
      std::memcpy(prox, p.data(), p.size() * sizeof(double));
    }
  });
}

int pifo_full_value(const pifo_instance_t* inst, const double* x, size_t len,
                    double* out) {
  if (!inst || !x || !out) return fail(PIFO_ERR_INVALID, "null argument");
  if (len != static_cast<size_t>(inst->inst.dim()))
    return fail(PIFO_ERR_INVALID, "vector length does not match instance");
  return guarded([&] { *out = pifo::full_value(inst->inst, to_vec(x, len)); });
}

int pifo_full_gradient(const pifo_instance_t* inst, const double* x, size_t len,
                       double* out) {
  if (!inst || !x || !out) return fail(PIFO_ERR_INVALID, "null argument");
  if (len != static_cast<size_t>(inst->inst.dim()))
    return fail(PIFO_ERR_INVALID, "vector length does not match instance");
  return guarded([&] {
    const pifo::Vec g = pifo::full_gradient(inst->inst, to_vec(x, len));
    std::memcpy(out, g.data(), g.size() * sizeof(double));
  });
}

int pifo_run(const pifo_instance_t* inst, const char* algorithm,
             const char* options_json, int64_t budget, uint64_t seed,
             pifo_trace_t** out) {
  if (!inst || !algorithm || !out)
    return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] {
    pifo::AlgorithmSpec algo;
    algo.name = algorithm;
    pifo::SamplingScheme scheme =
        pifo::SamplingScheme::uniform(inst->inst.n, seed);
    double target = -1.0;
    bool stop_at_target = true;
    int record_every = 1;
    if (options_json && *options_json) {
      const nlohmann::json opts = nlohmann::json::parse(options_json);
      algo.gamma = opts.value("gamma", 0.0);
      algo.step = opts.value("step", 0.0);
      algo.epoch = opts.value("epoch", 0);
      algo.span_check = opts.value("span_check", false);
      target = opts.value("target", -1.0);
      stop_at_target = opts.value("stop_at_target", true);
      record_every = opts.value("record_every", 1);
      if (opts.contains("probs"))
        scheme = pifo::SamplingScheme::explicit_probs(
            opts.at("probs").get<pifo::Vec>(), seed);
    }
    auto handle = std::make_unique<pifo_trace_t>();
    handle->algorithm = algo.name;
    handle->n = inst->inst.n;
    handle->trace = pifo::run(inst->inst, algo, scheme, budget, seed, target,
                              stop_at_target, record_every);
    *out = handle.release();
  });
}

int pifo_trace_csv(const pifo_trace_t* trace, char** csv_out) {
  if (!trace || !csv_out) return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] { *csv_out = dup_string(pifo::trace_csv(trace->trace)); });
}

int pifo_trace_summary(const pifo_trace_t* trace, char** json_out) {
  if (!trace || !json_out) return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] {
    nlohmann::json j;
    j["algorithm"] = trace->algorithm;
    j["queries"] = trace->trace.queries;
    j["final_metric"] = trace->trace.final_metric;
    j["target"] = trace->trace.target;
    if (trace->trace.queries_to_target >= 0)
      j["queries_to_target"] = trace->trace.queries_to_target;
    else
      j["queries_to_target"] = nullptr;  // censored
    j["draws"] = trace->trace.draws.size();
    j["span_residual"] = trace->trace.span_residual;
    const auto times = pifo::stopping_times(trace->trace.draws, trace->n, 1);
    j["first_extension_step"] = times[0];
    *json_out = dup_string(j.dump(2));
  });
}

void pifo_trace_free(pifo_trace_t* trace) { delete trace; }

int pifo_two_geo_tail(double p1, double p2, int64_t j, double* out) {
  if (!out) return fail(PIFO_ERR_INVALID, "null output");
  return guarded([&] { *out = pifo::two_geo_tail(p1, p2, j); });
}

int pifo_geo_tail_exact(const double* probs, size_t count, int64_t j,
                        double* out) {
  if (!probs || !out || count == 0)
    return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] {
    pifo::GeoSumModel model;
    model.probs.assign(probs, probs + count);
    *out = pifo::geo_sum_tail_exact(model, j);
  });
}

int pifo_geo_tail_mc(const double* probs, size_t count, double threshold,
                     int64_t trials, uint64_t seed, int jobs,
                     char** report_json) {
  if (!probs || !report_json || count == 0)
    return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] {
    pifo::GeoSumModel model;
    model.probs.assign(probs, probs + count);
    const pifo::TailReport report =
        pifo::geo_sum_tail_mc(model, threshold, trials, seed, jobs);
    *report_json = dup_string(pifo::tail_report_json(report));
  });
}

int pifo_certificate_tail(const pifo_instance_t* inst, const double* probs,
                          size_t count, int64_t trials, uint64_t seed,
                          int jobs, char** report_json) {
  if (!inst || !report_json) return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] {
    const pifo::SamplingScheme scheme =
        probs ? pifo::SamplingScheme::explicit_probs(
                    pifo::Vec(probs, probs + count), seed)
              : pifo::SamplingScheme::uniform(inst->inst.n, seed);
    const pifo::TailReport report =
        pifo::certificate_tail_check(inst->inst, scheme, trials, seed, jobs);
    *report_json = dup_string(pifo::tail_report_json(report));
  });
}

int pifo_fit_complexity(const char* records_json, char** fit_json) {
  if (!records_json || !fit_json) return fail(PIFO_ERR_INVALID, "null argument");
  return guarded([&] {
    const nlohmann::json j = nlohmann::json::parse(records_json);
    std::vector<pifo::FitRecord> records;
    for (const auto& r : j) {
      records.push_back({r.at("n").get<double>(), r.at("kappa").get<double>(),
                         r.at("log_ratio").get<double>(),
                         r.at("queries").get<double>()});
    }
    const pifo::FitSummary fit = pifo::fit_complexity(records);
    *fit_json = dup_string(pifo::fit_summary_json(fit));
  });
}

int pifo_verify(const char* suite, uint64_t seed, int jobs, char** report_json) {
  if (!suite) return fail(PIFO_ERR_INVALID, "null suite name");
  pifo::VerifyReport report;
  const int rc = guarded([&] { report = pifo::run_suite(suite, seed, jobs); });
  if (rc != PIFO_OK) return rc;
  if (report_json) *report_json = dup_string(pifo::report_json(report));
  if (!report.all_passed())
    return fail(PIFO_ERR_CHECK, "one or more checks failed");
  return PIFO_OK;
}

}  // extern "C"
