// pifobench command line: construct instances, run verification suites,
// execute solver runs and complexity sweeps. Talks to the core exclusively
// through the shared library's C interface.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pifobench.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

[[noreturn]] void die(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(kExitConfigError);
}

int map_status(int rc) {
  switch (rc) {
    case PIFO_OK: return kExitOk;
    case PIFO_ERR_CHECK: return kExitCheckFailed;
    default: return kExitConfigError;
  }
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  pifo_string_free(s);
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) die("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    die("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) die("cannot write " + path.string());
  out << text;
}

// Builds an instance from an inline config object or from {"file": path}.
pifo_instance_t* instance_from_config(const json& cfg) {
  pifo_instance_t* inst = nullptr;
  int rc = PIFO_ERR_INVALID;
  if (cfg.contains("file")) {
    const json doc = load_json_file(cfg.at("file").get<std::string>());
    rc = pifo_instance_from_json(doc.dump().c_str(), &inst);
  } else {
    const std::string family = cfg.value("family", "");
    const int n = cfg.value("n", 0);
    if (family == "sc") {
      rc = pifo_make_sc(cfg.at("L").get<double>(), cfg.at("mu").get<double>(), n,
                        cfg.at("delta").get<double>(), cfg.at("eps").get<double>(),
                        &inst);
    } else if (family == "c") {
      rc = pifo_make_c(cfg.at("L").get<double>(), cfg.at("b").get<double>(), n,
                       cfg.at("eps").get<double>(), &inst);
    } else if (family == "avg_sc") {
      rc = pifo_make_avg_sc(cfg.at("l_avg").get<double>(),
                            cfg.at("mu").get<double>(), n,
                            cfg.at("delta").get<double>(),
                            cfg.at("eps").get<double>(), &inst);
    } else if (family == "avg_c") {
      rc = pifo_make_avg_c(cfg.at("l_avg").get<double>(),
                           cfg.at("b").get<double>(), n,
                           cfg.at("eps").get<double>(), &inst);
    } else if (family == "one_d") {
      rc = pifo_make_one_d(cfg.at("L").get<double>(), cfg.at("b").get<double>(),
                           n, &inst);
    } else if (family == "nc") {
      rc = pifo_make_nc(cfg.at("L").get<double>(), cfg.at("sigma").get<double>(),
                        n, cfg.at("delta").get<double>(),
                        cfg.at("eps").get<double>(), &inst);
    } else {
      die("unknown or missing family '" + family + "'");
    }
  }
  if (rc != PIFO_OK) die(pifo_last_error());
  return inst;
}

json derived_summary(pifo_instance_t* inst) {
  json out;
  out["family"] = pifo_instance_family(inst);
  out["n"] = pifo_instance_components(inst);
  out["dim"] = pifo_instance_dim(inst);
  for (const char* name : {"L", "mu", "l_avg", "delta", "b_dist", "eps",
                           "alpha", "q", "xi", "omega", "m"}) {
    double v = 0.0;
    if (pifo_instance_scalar(inst, name, &v) == PIFO_OK && v != 0.0)
      out[name] = v;
  }
  double eps = 0.0;
  pifo_instance_scalar(inst, "eps", &eps);
  int depth = 0;
  int64_t budget = 0;
  double gap = 0.0;
  if (eps > 0.0 &&
      pifo_certificate(inst, eps, &depth, &budget, &gap) == PIFO_OK) {
    out["certificate"] = {{"M", depth}, {"N", budget}, {"gap_at_M", gap}};
  }
  return out;
}

// ------------------------------------------------------------------- gen

int cmd_gen(const std::string& config_path, const std::string& out_dir) {
  const json cfg = load_json_file(config_path);
  pifo_instance_t* inst = instance_from_config(cfg);
  char* doc = nullptr;
  const int rc = pifo_instance_to_json(inst, &doc);
  if (rc != PIFO_OK) die(pifo_last_error());
  const fs::path path = fs::path(out_dir) / "instance.json";
  write_file(path, take_string(doc));
  std::cout << derived_summary(inst).dump(2) << "\n";
  std::cout << "wrote " << path.string() << "\n";
  pifo_instance_free(inst);
  return kExitOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::string& suite, std::uint64_t seed, int jobs,
               const std::string& out_dir) {
  char* report_raw = nullptr;
  const int rc = pifo_verify(suite.c_str(), seed, jobs, &report_raw);
  if (rc != PIFO_OK && rc != PIFO_ERR_CHECK) die(pifo_last_error());
  const std::string report_text = take_string(report_raw);
  const json report = json::parse(report_text);
  for (const auto& check : report.at("checks")) {
    std::cout << (check.at("passed").get<bool>() ? "PASS" : "FAIL") << "  "
              << check.at("name").get<std::string>() << "  — "
              << check.at("detail").get<std::string>() << "\n";
  }
  std::cout << (rc == PIFO_OK ? "suite passed" : "suite FAILED") << " ("
            << report.at("checks").size() << " checks)\n";
  if (!out_dir.empty())
    write_file(fs::path(out_dir) / ("verify_" + suite + ".json"), report_text);
  return map_status(rc);
}

// ------------------------------------------------------------------- run

struct SeedResult {
  std::uint64_t seed = 0;
  json summary;
  std::string csv;
};

json run_options_from_config(const json& cfg) {
  json opts = json::object();
  if (cfg.contains("algorithm")) {
    const json& a = cfg.at("algorithm");
    for (const char* key : {"gamma", "step", "epoch"})
      if (a.contains(key)) opts[key] = a.at(key);
  }
  if (cfg.contains("sampling")) {
    const json& s = cfg.at("sampling");
    if (s.value("kind", "uniform") == "explicit")
      opts["probs"] = s.at("probs");
  }
  if (cfg.contains("target_subopt")) {
    opts["target"] = cfg.at("target_subopt");
    opts["stop_at_target"] = cfg.value("stop_at_target", true);
  }
  if (cfg.contains("record_every")) opts["record_every"] = cfg.at("record_every");
  if (cfg.contains("span_check")) opts["span_check"] = cfg.at("span_check");
  return opts;
}

std::vector<SeedResult> run_seeds(pifo_instance_t* inst,
                                  const std::string& algorithm,
                                  const json& options,
                                  const std::vector<std::uint64_t>& seeds,
                                  std::int64_t budget, int jobs) {
  std::vector<SeedResult> results(seeds.size());
  std::mutex fail_mutex;
  std::string failure;
  const std::string opts_text = options.dump();
  const auto worker = [&](std::size_t begin) {
    for (std::size_t idx = begin; idx < seeds.size(); idx += jobs) {
      pifo_trace_t* trace = nullptr;
      const int rc = pifo_run(inst, algorithm.c_str(), opts_text.c_str(),
                              budget, seeds[idx], &trace);
      if (rc != PIFO_OK) {
        std::scoped_lock lock(fail_mutex);
        failure = pifo_last_error();
        return;
      }
      char* csv = nullptr;
      char* summary = nullptr;
      pifo_trace_csv(trace, &csv);
      pifo_trace_summary(trace, &summary);
      results[idx].seed = seeds[idx];
      results[idx].csv = take_string(csv);
      results[idx].summary = json::parse(take_string(summary));
      results[idx].summary["seed"] = seeds[idx];
      pifo_trace_free(trace);
    }
  };
  if (jobs <= 1) {
    jobs = 1;
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  if (!failure.empty()) die(failure);
  return results;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            int jobs, std::int64_t seed_override) {
  const json cfg = load_json_file(config_path);
  pifo_instance_t* inst = instance_from_config(cfg.at("instance"));
  const std::string algorithm = cfg.at("algorithm").at("name").get<std::string>();
  const std::int64_t budget = cfg.at("budget").get<std::int64_t>();
  std::vector<std::uint64_t> seeds;
  if (seed_override >= 0) {
    seeds.push_back(static_cast<std::uint64_t>(seed_override));
  } else if (cfg.contains("seeds")) {
    for (const auto& s : cfg.at("seeds"))
      seeds.push_back(s.get<std::uint64_t>());
  } else {
    seeds.push_back(0);
  }
  const json options = run_options_from_config(cfg);
  const auto results = run_seeds(inst, algorithm, options, seeds, budget, jobs);

  json summary;
  summary["algorithm"] = algorithm;
  summary["budget"] = budget;
  summary["instance"] = derived_summary(inst);
  summary["runs"] = json::array();
  const bool has_target = cfg.contains("target_subopt");
  std::vector<double> reached;
  int censored = 0;
  for (const SeedResult& r : results) {
    summary["runs"].push_back(r.summary);
    const auto& q = r.summary.at("queries_to_target");
    if (!q.is_null()) reached.push_back(q.get<double>());
    else if (has_target) ++censored;
    write_file(fs::path(out_dir) / ("trace_s" + std::to_string(r.seed) + ".csv"),
               r.csv);
  }
  if (has_target) {
    summary["censored_runs"] = censored;
    if (!reached.empty())
      summary["median_queries_to_target"] = median_of(reached);
  }
  write_file(fs::path(out_dir) / "summary.json", summary.dump(2));
  std::cout << summary.dump(2) << "\n";
  pifo_instance_free(inst);
  return kExitOk;
}

// ----------------------------------------------------------------- sweep

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int jobs, std::int64_t seed_override) {
  const json cfg = load_json_file(config_path);
  const std::string family = cfg.value("family", "sc");
  if (family != "sc")
    die("sweep currently drives the strongly convex family only");
  const double mu = cfg.value("mu", 1.0);
  const double delta = cfg.value("delta", 1.0);
  const double eps_ratio = cfg.value("eps_over_delta", 1e-6);
  const std::string algorithm =
      cfg.contains("algorithm") ? cfg.at("algorithm").value("name", "point_saga")
                                : "point_saga";
  const double budget_factor = cfg.value("budget_factor", 50.0);
  const std::int64_t min_budget = cfg.value("min_budget", std::int64_t{20000});
  std::vector<std::uint64_t> seeds;
  if (seed_override >= 0) {
    seeds.push_back(static_cast<std::uint64_t>(seed_override));
  } else if (cfg.contains("seeds")) {
    for (const auto& s : cfg.at("seeds")) seeds.push_back(s.get<std::uint64_t>());
  }
  if (seeds.empty()) seeds = {1, 2, 3};
  if (!cfg.contains("n_values") || cfg.at("n_values").empty())
    die("sweep grid is empty: n_values required");
  if (!cfg.contains("kappa_multipliers") || cfg.at("kappa_multipliers").empty())
    die("sweep grid is empty: kappa_multipliers required");

  const double log_ratio = std::log(1.0 / eps_ratio);
  json records = json::array();
  std::ostringstream csv;
  csv << "n,kappa,log_ratio,queries,predicted\n";
  for (const auto& jn : cfg.at("n_values")) {
    const int n = jn.get<int>();
    for (const auto& jm : cfg.at("kappa_multipliers")) {
      const double kappa = jm.get<double>() * n;
      const double eps = eps_ratio * delta;
      pifo_instance_t* inst = nullptr;
      if (pifo_make_sc(kappa * mu, mu, n, delta, eps, &inst) != PIFO_OK)
        die(pifo_last_error());
      const double scale = (n + std::sqrt(n * kappa)) * log_ratio;
      const std::int64_t budget =
          std::max<std::int64_t>(min_budget,
                                 static_cast<std::int64_t>(budget_factor * scale));
      json options = run_options_from_config(cfg);
      options["target"] = eps;
      options["stop_at_target"] = true;
      options["record_every"] = 1000;
      const auto results = run_seeds(inst, algorithm, options, seeds, budget, jobs);
      std::vector<double> qs;
      for (const SeedResult& r : results) {
        const auto& q = r.summary.at("queries_to_target");
        if (!q.is_null()) qs.push_back(q.get<double>());
      }
      if (qs.empty())
        die("sweep run censored at n=" + std::to_string(n) +
            " kappa=" + std::to_string(kappa) + "; raise the budget");
      json rec;
      rec["n"] = n;
      rec["kappa"] = kappa;
      rec["log_ratio"] = log_ratio;
      rec["queries"] = median_of(qs);
      records.push_back(rec);
      pifo_instance_free(inst);
      std::cout << "n=" << n << " kappa=" << kappa
                << " median queries=" << median_of(qs) << "\n";
    }
  }
  char* fit_raw = nullptr;
  if (pifo_fit_complexity(records.dump().c_str(), &fit_raw) != PIFO_OK)
    die(pifo_last_error());
  const std::string fit_text = take_string(fit_raw);
  const json fit = json::parse(fit_text);
  for (const auto& rec : records) {
    const double n = rec.at("n").get<double>();
    const double kappa = rec.at("kappa").get<double>();
    const double lr = rec.at("log_ratio").get<double>();
    const double predicted = fit.at("a_n_log").get<double>() * n * lr +
                             fit.at("b_sqrt_nk_log").get<double>() *
                                 std::sqrt(n * kappa) * lr;
    csv << n << ',' << kappa << ',' << lr << ',' << rec.at("queries").get<double>()
        << ',' << predicted << '\n';
  }
  write_file(fs::path(out_dir) / "records.csv", csv.str());
  write_file(fs::path(out_dir) / "fit.json", fit_text);
  std::cout << fit_text << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adversarial finite-sum instances with exact proximal oracles"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string suite = "all";
  int jobs = 1;
  std::int64_t seed_flag = -1;
  std::uint64_t verify_seed = 20240807;

  auto* gen = app.add_subcommand("gen", "construct an instance and write it as JSON");
  gen->add_option("--config", config_path, "config JSON path")->required();
  gen->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite,
                     "structure|spanjump|minimizers|geo|nonconvex|all");
  verify->add_option("--seed", verify_seed, "base seed");
  verify->add_option("--jobs", jobs, "worker threads");
  std::string verify_out;
  verify->add_option("--out", verify_out, "directory for the JSON report");

  auto* runc = app.add_subcommand("run", "run an algorithm against an instance");
  runc->add_option("--config", config_path, "config JSON path")->required();
  runc->add_option("--out", out_dir, "output directory");
  runc->add_option("--jobs", jobs, "worker threads (across seeds)");
  runc->add_option("--seed", seed_flag, "override: run this single seed");

  auto* sweep = app.add_subcommand("sweep", "grid of runs plus complexity fit");
  sweep->add_option("--config", config_path, "config JSON path")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--jobs", jobs, "worker threads (across seeds)");
  sweep->add_option("--seed", seed_flag, "override: sweep with this single seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(config_path, out_dir);
    if (verify->parsed()) return cmd_verify(suite, verify_seed, jobs, verify_out);
    if (runc->parsed()) return cmd_run(config_path, out_dir, jobs, seed_flag);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, jobs, seed_flag);
  } catch (const std::exception& e) {
    die(e.what());
  }
  return kExitConfigError;
}
