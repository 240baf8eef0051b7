/* pifobench — adversarial finite-sum optimization instances with exact
 * proximal oracles, reference stochastic solvers and statistical
 * verification of their query-complexity certificates.
 *
 * C interface of the shared library. All functions return a status code
 * (PIFO_OK on success); pifo_last_error() describes the most recent failure
 * on the calling thread. Handles are opaque and must be released with the
 * matching *_free function. Component indices are 1-based.
 */
#ifndef PIFOBENCH_H
#define PIFOBENCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pifo_instance_t pifo_instance_t;
typedef struct pifo_trace_t pifo_trace_t;

enum {
  PIFO_OK = 0,
  PIFO_ERR_CHECK = 1,   /* a verification suite reported failing checks */
  PIFO_ERR_DOMAIN = 2,  /* parameter outside a documented validity region */
  PIFO_ERR_INVALID = 3, /* null handle, bad dimension, unknown name */
  PIFO_ERR_NUMERIC = 4, /* iterative routine failed to converge */
};

/* Message for the last error on this thread; empty string if none. */
const char* pifo_last_error(void);

/* Releases strings returned through char** out-parameters. */
void pifo_string_free(char* s);

/* --- instance construction ----------------------------------------- */

int pifo_make_sc(double L, double mu, int n, double delta, double eps,
                 pifo_instance_t** out);
int pifo_make_c(double L, double b_dist, int n, double eps,
                pifo_instance_t** out);
int pifo_make_avg_sc(double l_avg, double mu, int n, double delta, double eps,
                     pifo_instance_t** out);
int pifo_make_avg_c(double l_avg, double b_dist, int n, double eps,
                    pifo_instance_t** out);
int pifo_make_one_d(double L, double b_dist, int n, pifo_instance_t** out);
int pifo_make_nc(double L, double sigma, int n, double delta, double eps,
                 pifo_instance_t** out);

/* Serialization; scalars travel as hex-float strings, so a round trip
 * reproduces bit-identical doubles. */
int pifo_instance_to_json(const pifo_instance_t* inst, char** json_out);
int pifo_instance_from_json(const char* json, pifo_instance_t** out);
void pifo_instance_free(pifo_instance_t* inst);

/* --- instance queries ----------------------------------------------- */

int pifo_instance_dim(const pifo_instance_t* inst);      /* ambient dimension */
int pifo_instance_components(const pifo_instance_t* inst); /* n */
const char* pifo_instance_family(const pifo_instance_t* inst);

/* Named derived scalar (L, mu, l_avg, delta, b_dist, eps, lambda0, lambda1,
 * lambda2, omega, alpha, q, xi, sigma, nc_alpha, nc_lambda, nc_beta,
 * gamma_limit, m). */
int pifo_instance_scalar(const pifo_instance_t* inst, const char* name,
                         double* out);

/* Closed-form minimizer; x_star must hold pifo_instance_dim() doubles. */
int pifo_minimizer(const pifo_instance_t* inst, double* x_star, double* f_star);

/* Query-budget certificate at accuracy eps. */
int pifo_certificate(const pifo_instance_t* inst, double eps, int* m_depth,
                     int64_t* n_queries, double* gap);

/* --- oracle ---------------------------------------------------------- */

/* One proximal incremental first-order oracle call: f_i(x), grad f_i(x) and
 * prox of f_i at x with parameter gamma. Any output pointer may be NULL.
 * len must equal pifo_instance_dim(). */
int pifo_oracle(const pifo_instance_t* inst, int component, const double* x,
                size_t len, double gamma, double* value, double* grad,
                double* prox);

int pifo_full_value(const pifo_instance_t* inst, const double* x, size_t len,
                    double* out);
int pifo_full_gradient(const pifo_instance_t* inst, const double* x,
                       size_t len, double* out);

/* --- runs ------------------------------------------------------------ */

/* Runs an algorithm (prox_point | sgd | svrg | saga | point_saga | greedy)
 * against the instance's oracle, starting at 0, for at most `budget` oracle
 * queries. options_json may be NULL or a JSON object with optional keys:
 *   gamma, step, epoch      -- hyperparameters (defaults are documented)
 *   probs: [..]             -- explicit sampling probabilities (sum 1)
 *   target: t               -- record queries needed to reach metric <= t
 *   stop_at_target: bool    -- stop once the target is reached (default true)
 *   record_every: k         -- trace thinning (default 1)
 *   span_check: bool        -- verify iterates stay in the oracle span
 */
int pifo_run(const pifo_instance_t* inst, const char* algorithm,
             const char* options_json, int64_t budget, uint64_t seed,
             pifo_trace_t** out);

int pifo_trace_csv(const pifo_trace_t* trace, char** csv_out);
int pifo_trace_summary(const pifo_trace_t* trace, char** json_out);
void pifo_trace_free(pifo_trace_t* trace);

/* --- analysis --------------------------------------------------------- */

/* Exact P(X1 + X2 > j) for independent geometric variables. */
int pifo_two_geo_tail(double p1, double p2, int64_t j, double* out);

/* Exact tail of a sum of geometrics, by convolution. */
int pifo_geo_tail_exact(const double* probs, size_t count, int64_t j,
                        double* out);

/* Monte Carlo tail of a sum of geometrics; report arrives as JSON. */
int pifo_geo_tail_mc(const double* probs, size_t count, double threshold,
                     int64_t trials, uint64_t seed, int jobs,
                     char** report_json);

/* Certificate tail of an instance under uniform sampling (or explicit probs
 * when probs != NULL). */
int pifo_certificate_tail(const pifo_instance_t* inst, const double* probs,
                          size_t count, int64_t trials, uint64_t seed,
                          int jobs, char** report_json);

/* Least-squares fit of measured query counts against
 * a n log(delta/eps) + b sqrt(n kappa) log(delta/eps). records_json is an
 * array of {n, kappa, log_ratio, queries}. */
int pifo_fit_complexity(const char* records_json, char** fit_json);

/* --- verification ------------------------------------------------------ */

/* Runs a named check suite (structure | spanjump | minimizers | geo |
 * nonconvex | all). Returns PIFO_OK when every check passes and
 * PIFO_ERR_CHECK otherwise; the per-check report is written to report_json
 * in both cases. */
int pifo_verify(const char* suite, uint64_t seed, int jobs, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* PIFOBENCH_H */
