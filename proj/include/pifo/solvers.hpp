#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pifo/instances.hpp"
#include "pifo/oracle.hpp"

namespace pifo {

// Fixed per-component sampling probabilities plus a seeded counter-based
// stream. Probabilities are kept sorted ascending; a draw at step t is a pure
// function of (seed, t), so traces replay bitwise under the same seed.
struct SamplingScheme {
  Vec probs;               // p_1 <= ... <= p_n, sum 1
  std::uint64_t seed = 0;

  static SamplingScheme uniform(int n, std::uint64_t seed);
  static SamplingScheme explicit_probs(Vec probs, std::uint64_t seed);
};

// 1-based component index drawn at step t.
int sample_index(const SamplingScheme& scheme, std::int64_t t);

struct AlgorithmSpec {
  std::string name;      // prox_point | sgd | svrg | saga | point_saga | greedy
  double gamma = 0.0;    // prox parameter; 0 = per-instance default
  double step = 0.0;     // gradient step; 0 = per-instance default
  int epoch = 0;         // svrg epoch length; 0 = default 2n
  bool span_check = false;  // verify iterates stay inside the oracle span
};

struct TraceRow {
  std::int64_t t = 0;
  int i = 0;              // sampled component (0 for rows before any draw)
  double gamma = 0.0;
  std::int64_t queries = 0;
  double metric = 0.0;    // suboptimality, or gradient norm for NC
  int k = 0;              // subspace depth of the iterate
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::vector<int> draws;        // every sampled i_t, in order
  std::string metric_name;       // "subopt", or "grad_norm" for NC
  Vec final_x;
  std::int64_t queries = 0;
  double final_metric = 0.0;
  std::int64_t queries_to_target = -1;  // -1 = censored (never reached)
  double target = -1.0;
  double span_residual = 0.0;    // worst projection residual in debug mode
};

// Executes the algorithm against the instance's oracle. x_0 = 0. Every
// oracle access goes through pifo_call and is tallied; the run stops when
// the budget is exhausted (or once the target suboptimality is reached, when
// target >= 0 and stop_at_target is set).
RunTrace run(const HardInstance& inst, const AlgorithmSpec& algo,
             const SamplingScheme& scheme, std::int64_t budget,
             std::uint64_t seed, double target = -1.0,
             bool stop_at_target = true, int record_every = 1);

// Adversary-side probe: at each step takes the prox of the sampled component
// at the incumbent best point and keeps whichever is better. Span-respecting
// by construction, maximally eager to extend the reachable subspace.
RunTrace greedy_span_probe(const HardInstance& inst,
                           const SamplingScheme& scheme, std::int64_t budget,
                           std::uint64_t seed);

// CSV with columns t,i,gamma,queries,subopt|grad_norm,k.
std::string trace_csv(const RunTrace& trace);

}  // namespace pifo
