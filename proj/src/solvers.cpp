#include "pifo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pifo/errors.hpp"
#include "pifo/rng.hpp"

namespace pifo {

namespace {

struct BudgetExhausted {};

// Counts queries against the budget and records sampled draws. Throwing at
// the budget boundary lets an algorithm be cut mid-step so the final tally
// equals the budget exactly.
class OracleGate {
 public:
  OracleGate(const HardInstance& inst, std::int64_t budget)
      : inst_(inst), budget_(budget) {}

  OracleReply call(int i, const Vec& x, double gamma) {
    if (counter_.count() >= budget_) throw BudgetExhausted{};
    return pifo_call(inst_, i, x, gamma, &counter_);
  }

  std::int64_t queries() const { return counter_.count(); }

 private:
  const HardInstance& inst_;
  QueryCounter counter_;
  std::int64_t budget_;
};

// Incremental orthonormal basis of the accumulated oracle span, for the
// debug-mode compliance check.
class SpanBasis {
 public:
  explicit SpanBasis(int dim) : dim_(dim) {}

  void add(const Vec& v) {
    Vec r = project_residual(v);
    const double nr = norm2(r);
    if (nr > 1e-12 * (1.0 + norm2(v))) {
      scale(r, 1.0 / nr);
      basis_.push_back(std::move(r));
    }
  }

  double residual(const Vec& v) const {
    Vec r = project_residual(v);
    return norm2(r);
  }

 private:
  Vec project_residual(const Vec& v) const {
    Vec r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& b : basis_) axpy(-dot(b, r), b, r);
    }
    return r;
  }

  int dim_;
  std::vector<Vec> basis_;
};

double default_gamma(const HardInstance& inst, const AlgorithmSpec& algo) {
  if (algo.gamma > 0.0) return algo.gamma;
  if (inst.family == Family::NC) return 0.5 * prox_gamma_limit(inst);
  return 1.0 / inst.L;
}

double point_saga_gamma(const HardInstance& inst) {
  const double n = inst.n, L = inst.L;
  if (inst.mu > 0.0) {
    // step-size rule from the original method, driven by (n, L, mu)
    return std::sqrt((n - 1.0) * (n - 1.0) + 4.0 * n * L / inst.mu) /
               (2.0 * L * n) -
           (1.0 - 1.0 / n) / (2.0 * L);
  }
  return 1.0 / (L * std::sqrt(n));
}

}  // namespace

SamplingScheme SamplingScheme::uniform(int n, std::uint64_t seed) {
  if (n < 2) throw domain_error("sampling scheme requires n >= 2");
  SamplingScheme s;
  s.probs.assign(n, 1.0 / n);
  s.seed = seed;
  return s;
}

SamplingScheme SamplingScheme::explicit_probs(Vec probs, std::uint64_t seed) {
  if (probs.size() < 2) throw domain_error("sampling scheme requires n >= 2");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw domain_error("sampling probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw domain_error("sampling probabilities must sum to 1");
  std::sort(probs.begin(), probs.end());  // analysis convention: ascending
  SamplingScheme s;
  s.probs = std::move(probs);
  s.seed = seed;
  return s;
}

int sample_index(const SamplingScheme& scheme, std::int64_t t) {
  const double u = counter_u01(scheme.seed, static_cast<std::uint64_t>(t));
  double acc = 0.0;
  const int n = static_cast<int>(scheme.probs.size());
  for (int i = 0; i < n; ++i) {
    acc += scheme.probs[i];
    if (u < acc) return i + 1;
  }
  return n;
}

namespace {

struct RunContext {
  const HardInstance& inst;
  OracleGate gate;
  SamplingScheme stream;
  std::vector<int> draws;
  double f_star = 0.0;
  bool grad_metric = false;

  RunContext(const HardInstance& inst_, const SamplingScheme& scheme,
             std::int64_t budget, std::uint64_t seed)
      : inst(inst_), gate(inst_, budget), stream(scheme) {
    stream.seed = derive_seed(scheme.seed, seed);
    grad_metric = inst.family == Family::NC;
    if (!grad_metric) f_star = minimizer(inst).second;
  }

  int draw() {
    const int i = sample_index(stream, static_cast<std::int64_t>(draws.size()));
    draws.push_back(i);
    return i;
  }

  double metric(const Vec& x) const {
    if (grad_metric) return norm2(full_gradient(inst, x));
    return full_value(inst, x) - f_star;
  }
};

}  // namespace

RunTrace run(const HardInstance& inst, const AlgorithmSpec& algo,
             const SamplingScheme& scheme, std::int64_t budget,
             std::uint64_t seed, double target, bool stop_at_target,
             int record_every) {
  if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
  if (static_cast<int>(scheme.probs.size()) != inst.n)
    throw std::invalid_argument("sampling scheme size does not match instance");
  if (record_every < 1) record_every = 1;

  RunContext ctx(inst, scheme, budget, seed);
  const int dim = inst.dim();
  const double gamma = default_gamma(inst, algo);

  RunTrace trace;
  trace.metric_name = ctx.grad_metric ? "grad_norm" : "subopt";
  trace.target = target;
  Vec x(dim, 0.0);
  SpanBasis span(dim);
  const bool span_check = algo.span_check;

  std::int64_t t = 0;
  int last_i = 0;
  const auto record = [&](bool force) {
    if (!force && t % record_every != 0) return;
    TraceRow row;
    row.t = t;
    row.i = last_i;
    row.gamma = gamma;
    row.queries = ctx.gate.queries();
    row.metric = ctx.metric(x);
    row.k = subspace_index(x, inst.orient);
    trace.rows.push_back(row);
  };
  const auto after_step = [&]() -> bool {  // returns true to stop
    ++t;
    if (span_check)
      trace.span_residual =
          std::max(trace.span_residual, span.residual(x) / (1.0 + norm2(x)));
    record(false);
    if (target >= 0.0 && trace.queries_to_target < 0 &&
        ctx.metric(x) <= target) {
      trace.queries_to_target = ctx.gate.queries();
      if (stop_at_target) return true;
    }
    return false;
  };

  record(true);  // initial point

  try {
    if (algo.name == "prox_point") {
      while (true) {
        last_i = ctx.draw();
        const OracleReply r = ctx.gate.call(last_i, x, gamma);
        if (span_check) {
          span.add(r.gradient);
          span.add(r.prox_point);
        }
        x = r.prox_point;
        if (after_step()) break;
      }
    } else if (algo.name == "sgd") {
      const double step = algo.step > 0.0 ? algo.step : 0.5 / inst.L;
      while (true) {
        last_i = ctx.draw();
        const OracleReply r = ctx.gate.call(last_i, x, gamma);
        if (span_check) {
          span.add(r.gradient);
          span.add(r.prox_point);
        }
        axpy(-step, r.gradient, x);
        if (after_step()) break;
      }
    } else if (algo.name == "svrg") {
      const double step = algo.step > 0.0 ? algo.step : 0.25 / inst.L;
      const int epoch = algo.epoch > 0 ? algo.epoch : 2 * inst.n;
      Vec anchor = x;
      Vec anchor_grad(dim, 0.0);
      while (true) {
        // full gradient at the anchor, one query per component
        anchor = x;
        std::fill(anchor_grad.begin(), anchor_grad.end(), 0.0);
        for (int i = 1; i <= inst.n; ++i) {
          const OracleReply r = ctx.gate.call(i, anchor, gamma);
          if (span_check) {
            span.add(r.gradient);
            span.add(r.prox_point);
          }
          axpy(1.0 / inst.n, r.gradient, anchor_grad);
        }
        bool stop = false;
        for (int s = 0; s < epoch && !stop; ++s) {
          last_i = ctx.draw();
          const OracleReply rx = ctx.gate.call(last_i, x, gamma);
          const OracleReply ra = ctx.gate.call(last_i, anchor, gamma);
          if (span_check) {
            span.add(rx.gradient);
            span.add(rx.prox_point);
            span.add(ra.gradient);
            span.add(ra.prox_point);
          }
          Vec g = rx.gradient;
          axpy(-1.0, ra.gradient, g);
          axpy(1.0, anchor_grad, g);
          axpy(-step, g, x);
          stop = after_step();
        }
        if (stop) break;
      }
    } else if (algo.name == "saga") {
      const double step = algo.step > 0.0 ? algo.step : 1.0 / (3.0 * inst.L);
      std::vector<Vec> table(inst.n, Vec(dim, 0.0));
      Vec table_mean(dim, 0.0);
      while (true) {
        last_i = ctx.draw();
        const OracleReply r = ctx.gate.call(last_i, x, gamma);
        if (span_check) {
          span.add(r.gradient);
          span.add(r.prox_point);
        }
        Vec dir = r.gradient;
        axpy(-1.0, table[last_i - 1], dir);
        axpy(1.0, table_mean, dir);
        axpy(-step, dir, x);
        // fold the fresh gradient into the table
        Vec diff = r.gradient;
        axpy(-1.0, table[last_i - 1], diff);
        axpy(1.0 / inst.n, diff, table_mean);
        table[last_i - 1] = r.gradient;
        if (after_step()) break;
      }
    } else if (algo.name == "point_saga") {
      const double g_ps = algo.gamma > 0.0 ? algo.gamma : point_saga_gamma(inst);
      std::vector<Vec> table(inst.n, Vec(dim, 0.0));
      Vec table_mean(dim, 0.0);
      while (true) {
        last_i = ctx.draw();
        Vec z = x;
        axpy(g_ps, table[last_i - 1], z);
        axpy(-g_ps, table_mean, z);
        const OracleReply r = ctx.gate.call(last_i, z, g_ps);
        if (span_check) {
          span.add(r.gradient);
          span.add(r.prox_point);
        }
        x = r.prox_point;
        // prox optimality: (z - x)/gamma is the component gradient at x
        Vec g_new = z;
        axpy(-1.0, x, g_new);
        scale(g_new, 1.0 / g_ps);
        Vec diff = g_new;
        axpy(-1.0, table[last_i - 1], diff);
        axpy(1.0 / inst.n, diff, table_mean);
        table[last_i - 1] = std::move(g_new);
        if (after_step()) break;
      }
    } else if (algo.name == "greedy") {
      double f_best = ctx.grad_metric ? ctx.metric(x) : full_value(inst, x);
      while (true) {
        last_i = ctx.draw();
        const OracleReply r = ctx.gate.call(last_i, x, gamma);
        if (span_check) {
          span.add(r.gradient);
          span.add(r.prox_point);
        }
        const double f_cand = ctx.grad_metric ? ctx.metric(r.prox_point)
                                              : full_value(inst, r.prox_point);
        if (f_cand < f_best) {
          f_best = f_cand;
          x = r.prox_point;
        }
        if (after_step()) break;
      }
    } else {
      throw domain_error("unknown algorithm '" + algo.name + "'");
    }
  } catch (const BudgetExhausted&) {
    // cut mid-step; the last completed iterate stands
  }

  trace.queries = ctx.gate.queries();
  trace.draws = std::move(ctx.draws);
  trace.final_x = x;
  trace.final_metric = ctx.metric(x);
  if (trace.rows.empty() || trace.rows.back().t != t) record(true);
  // queries spent on a step the budget cut short still count
  trace.rows.back().queries = trace.queries;
  return trace;
}

RunTrace greedy_span_probe(const HardInstance& inst,
                           const SamplingScheme& scheme, std::int64_t budget,
                           std::uint64_t seed) {
  AlgorithmSpec algo;
  algo.name = "greedy";
  return run(inst, algo, scheme, budget, seed);
}

std::string trace_csv(const RunTrace& trace) {
  std::ostringstream out;
  const std::string metric =
      trace.metric_name.empty() ? "metric" : trace.metric_name;
  out << "t,i,gamma,queries," << metric << ",k\n";
  out.precision(17);
  for (const TraceRow& row : trace.rows) {
    out << row.t << ',' << row.i << ',' << row.gamma << ',' << row.queries
        << ',' << row.metric << ',' << row.k << '\n';
  }
  return out.str();
}

}  // namespace pifo
