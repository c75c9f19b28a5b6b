// Command-line harness over the reject_active C API: single runs,
// active-vs-passive learning curves, the convergence-rate check and
// synthetic dataset generation.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reject_active.h"

namespace {

using ConfigHandle = std::unique_ptr<ral_config, decltype(&ral_config_free)>;
using DatasetHandle = std::unique_ptr<ral_dataset, decltype(&ral_dataset_free)>;
using ResultHandle = std::unique_ptr<ral_result, decltype(&ral_result_free)>;
using CurveHandle = std::unique_ptr<ral_curve, decltype(&ral_curve_free)>;
using RateHandle = std::unique_ptr<ral_rate, decltype(&ral_rate_free)>;

int exit_code_for(int rc) {
  switch (rc) {
    case RAL_OK:
      return 0;
    case RAL_ERR_CONFIG:
    case RAL_ERR_INPUT:
    case RAL_ERR_LOAD:
      return 1;
    default:
      return 2;  // runtime abort or IO failure
  }
}

int report(int rc) {
  std::fprintf(stderr, "error: %s\n", ral_last_error());
  return exit_code_for(rc);
}

struct Options {
  std::string dataset = "sine";
  std::string csv_path;
  std::string label_col;
  std::string learner = "linear";
  int knn_k = 5;
  double hist_r = 0.0;
  long long budget = 5000;
  std::string budgets;
  int repeats = 10;
  std::string mode = "practical";
  double cn = 1.2;
  double ceps = 0.95;
  double delta = 0.05;
  int n0_mult = 0;
  int mk = 150;
  double u = 1e-5;
  int recycle_labeled = 1;
  int recycle_unlabeled = 1;
  long long pool_size = 100000;
  double test_size = 0.0;
  unsigned long long seed = 1;
  std::string out;
  bool passive = false;
  int rate_dim = 1;
};

void add_dataset_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.dataset, "sine|dasgupta1|easyhard2|gauss3|csv")
      ->capture_default_str();
  cmd->add_option("--csv-path", o.csv_path, "CSV file (with --dataset csv)");
  cmd->add_option("--label-col", o.label_col, "label column: 0-based index or name (default: last)");
  cmd->add_option("--pool-size", o.pool_size,
                  "synthetic pool size; 0 samples the distribution directly")
      ->capture_default_str();
}

void add_engine_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--learner", o.learner, "histogram|knn|linear")->capture_default_str();
  cmd->add_option("--knn-k", o.knn_k, "neighbors for the knn learner")->capture_default_str();
  cmd->add_option("--hist-r", o.hist_r, "histogram cell width override (0: schedule default)")
      ->capture_default_str();
  cmd->add_option("--mode", o.mode, "schedule mode: practical|theoretical")->capture_default_str();
  cmd->add_option("--cn", o.cn, "budget growth factor c_N")->capture_default_str();
  cmd->add_option("--ceps", o.ceps, "practical rejection-rate factor c_eps")->capture_default_str();
  cmd->add_option("--delta", o.delta, "theoretical confidence level delta")->capture_default_str();
  cmd->add_option("--n0-mult", o.n0_mult, "N0 = mult*floor(sqrt(N)); 0: mode default")
      ->capture_default_str();
  cmd->add_option("--mk", o.mk, "unlabeled conditional points per step")->capture_default_str();
  cmd->add_option("--u", o.u, "score randomization width")->capture_default_str();
  cmd->add_option("--recycle-labeled", o.recycle_labeled, "reuse labeled points inside the region (0|1)")
      ->capture_default_str();
  cmd->add_option("--recycle-unlabeled", o.recycle_unlabeled, "reuse unlabeled survivors (0|1)")
      ->capture_default_str();
  cmd->add_option("--test-size", o.test_size,
                  "test points (>=1) or held-out pool fraction (<1); 0: defaults")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "base RNG seed")->capture_default_str();
}

// the rate check uses a steep multi-crossing sine wave so the histogram
// grid never aligns with a single decision boundary
constexpr double kRateOmega = 8.8;
constexpr double kRatePhi = 0.9;

int make_dataset(const Options& o, int synth_dim, bool rate_wave, DatasetHandle& out) {
  ral_dataset* raw = nullptr;
  int rc;
  if (o.dataset == "csv") {
    if (o.csv_path.empty()) {
      std::fprintf(stderr, "error: --csv-path is required with --dataset csv\n");
      return RAL_ERR_CONFIG;
    }
    rc = ral_dataset_csv(o.csv_path.c_str(), o.label_col.c_str(), 1, &raw);
  } else {
    const double omega = rate_wave ? kRateOmega : 0.0;
    const double phi = rate_wave ? kRatePhi : 0.0;
    rc = ral_dataset_synthetic(o.dataset.c_str(), synth_dim, 0.0, omega, phi, o.pool_size, &raw);
  }
  if (rc == RAL_OK) {
    out.reset(raw);
  }
  return rc;
}

int make_config(const Options& o, long long budget, ConfigHandle& out) {
  ConfigHandle cfg(ral_config_new(), &ral_config_free);
  int rc = RAL_OK;
  auto apply = [&](int step_rc) {
    if (rc == RAL_OK) rc = step_rc;
  };
  apply(ral_config_set_budget(cfg.get(), budget));
  apply(ral_config_set_mode(cfg.get(), o.mode.c_str()));
  apply(ral_config_set_learner(cfg.get(), o.learner.c_str()));
  apply(ral_config_set_knn_k(cfg.get(), o.knn_k));
  apply(ral_config_set_hist_r(cfg.get(), o.hist_r));
  apply(ral_config_set_cn(cfg.get(), o.cn));
  apply(ral_config_set_ceps(cfg.get(), o.ceps));
  apply(ral_config_set_delta(cfg.get(), o.delta));
  apply(ral_config_set_n0_mult(cfg.get(), o.n0_mult));
  apply(ral_config_set_mk(cfg.get(), o.mk));
  apply(ral_config_set_u(cfg.get(), o.u));
  apply(ral_config_set_recycle(cfg.get(), o.recycle_labeled, o.recycle_unlabeled));
  apply(ral_config_set_seed(cfg.get(), o.seed));
  apply(ral_config_set_test_size(cfg.get(), o.test_size));
  if (rc == RAL_OK) {
    out = std::move(cfg);
  }
  return rc;
}

bool parse_budgets(const std::string& list, std::vector<long long>& out) {
  out.clear();
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string tok = list.substr(start, comma == std::string::npos ? comma : comma - start);
    if (tok.empty()) {
      return false;
    }
    try {
      out.push_back(std::stoll(tok));
    } catch (const std::exception&) {
      return false;
    }
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return !out.empty();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int cmd_run(const Options& o) {
  DatasetHandle dataset(nullptr, &ral_dataset_free);
  if (int rc = make_dataset(o, 0, false, dataset); rc != RAL_OK) return report(rc);
  ConfigHandle cfg(nullptr, &ral_config_free);
  if (int rc = make_config(o, o.budget, cfg); rc != RAL_OK) return report(rc);

  ral_result* raw = nullptr;
  const int rc = o.passive ? ral_run_passive(cfg.get(), dataset.get(), &raw)
                           : ral_run_active(cfg.get(), dataset.get(), &raw);
  if (rc != RAL_OK) return report(rc);
  ResultHandle result(raw, &ral_result_free);

  if (!o.out.empty()) {
    const int wrc = ends_with(o.out, ".csv") ? ral_result_write_csv(result.get(), o.out.c_str())
                                             : ral_result_write_json(result.get(), o.out.c_str());
    if (wrc != RAL_OK) return report(wrc);
  }

  double precision = 0.0, excess = 0.0;
  int has_excess = 0;
  ral_result_metrics(result.get(), &precision, &excess, &has_excess);
  std::printf("mode=%s precision=%.4f", o.passive ? "passive" : "active", precision);
  if (has_excess) {
    std::printf(" excess_risk=%.6f", excess);
  }
  std::printf(" budget_used=%lld steps=%d stages=%d\n", ral_result_budget_used(result.get()),
              ral_result_num_steps(result.get()), ral_result_num_stages(result.get()));
  if (ral_result_incomplete(result.get())) {
    std::fprintf(stderr, "run aborted: %s\n", ral_result_abort_reason(result.get()));
    return 2;
  }
  return 0;
}

int cmd_curve(const Options& o) {
  std::vector<long long> budgets;
  if (!parse_budgets(o.budgets, budgets)) {
    std::fprintf(stderr, "error: --budgets must be a comma-separated integer list\n");
    return 1;
  }
  DatasetHandle dataset(nullptr, &ral_dataset_free);
  if (int rc = make_dataset(o, 0, false, dataset); rc != RAL_OK) return report(rc);
  ConfigHandle cfg(nullptr, &ral_config_free);
  if (int rc = make_config(o, budgets.back(), cfg); rc != RAL_OK) return report(rc);

  ral_curve* raw = nullptr;
  const int rc = ral_curve_run(cfg.get(), dataset.get(), budgets.data(),
                               static_cast<int>(budgets.size()), o.repeats, &raw);
  if (rc != RAL_OK) return report(rc);
  CurveHandle curve(raw, &ral_curve_free);

  if (!o.out.empty()) {
    const int wrc = ends_with(o.out, ".json") ? ral_curve_write_json(curve.get(), o.out.c_str())
                                              : ral_curve_write_csv(curve.get(), o.out.c_str());
    if (wrc != RAL_OK) return report(wrc);
  }
  for (int i = 0; i < ral_curve_num_points(curve.get()); ++i) {
    ral_curve_point p;
    ral_curve_point_at(curve.get(), i, &p);
    std::printf("budget=%lld mode=%s precision=%.4f±%.4f aborts=%d\n", p.budget,
                p.is_active ? "active" : "passive", p.precision_mean, p.precision_std, p.aborts);
  }
  return 0;
}

int cmd_rate_check(const Options& o) {
  std::vector<long long> budgets;
  if (!parse_budgets(o.budgets, budgets)) {
    std::fprintf(stderr, "error: --budgets must be a comma-separated integer list\n");
    return 1;
  }
  DatasetHandle dataset(nullptr, &ral_dataset_free);
  if (int rc = make_dataset(o, o.rate_dim, true, dataset); rc != RAL_OK) return report(rc);
  ConfigHandle cfg(nullptr, &ral_config_free);
  if (int rc = make_config(o, budgets.back(), cfg); rc != RAL_OK) return report(rc);

  ral_rate* raw = nullptr;
  const int rc = ral_rate_check(cfg.get(), dataset.get(), budgets.data(),
                                static_cast<int>(budgets.size()), o.repeats, &raw);
  if (rc != RAL_OK) return report(rc);
  RateHandle rate(raw, &ral_rate_free);

  if (!o.out.empty()) {
    if (int wrc = ral_rate_write_json(rate.get(), o.out.c_str()); wrc != RAL_OK) return report(wrc);
  }
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  ral_rate_stats(rate.get(), &slope, &intercept, &r2);
  std::printf("slope=%.4f intercept=%.4f r_squared=%.4f\n", slope, intercept, r2);
  return 0;
}

int cmd_gen_data(const Options& o) {
  if (o.dataset == "csv") {
    std::fprintf(stderr, "error: gen-data needs a synthetic dataset\n");
    return 1;
  }
  if (o.pool_size < 1) {
    std::fprintf(stderr, "error: --pool-size must be positive for gen-data\n");
    return 1;
  }
  if (o.out.empty()) {
    std::fprintf(stderr, "error: gen-data requires --out\n");
    return 1;
  }
  ral_dataset* raw = nullptr;
  if (int rc = ral_dataset_synthetic(o.dataset.c_str(), 0, 0.0, 0.0, 0.0, 0, &raw); rc != RAL_OK) {
    return report(rc);
  }
  DatasetHandle dataset(raw, &ral_dataset_free);
  if (int rc = ral_dataset_write_csv(dataset.get(), o.pool_size, o.seed, o.out.c_str());
      rc != RAL_OK) {
    return report(rc);
  }
  std::printf("wrote %lld points to %s\n", o.pool_size, o.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active learning with rejection-based uncertain regions"};
  app.require_subcommand(1);

  Options run_opts, curve_opts, rate_opts, gen_opts;

  CLI::App* run = app.add_subcommand("run", "single active (or passive) run");
  add_dataset_flags(run, run_opts);
  add_engine_flags(run, run_opts);
  run->add_option("--budget", run_opts.budget, "label budget N")->capture_default_str();
  run->add_flag("--passive", run_opts.passive, "run the passive baseline instead");
  run->add_option("--out", run_opts.out, "output file (.json record or .csv step trace)");

  CLI::App* curve = app.add_subcommand("curve", "active vs passive learning curve");
  add_dataset_flags(curve, curve_opts);
  add_engine_flags(curve, curve_opts);
  curve->add_option("--budgets", curve_opts.budgets, "ascending comma-separated budgets")
      ->required();
  curve->add_option("--repeats", curve_opts.repeats, "independent seeds per cell")
      ->capture_default_str();
  curve->add_option("--out", curve_opts.out, "output file (.csv default, .json mirror)");

  CLI::App* rate = app.add_subcommand("rate-check", "excess-risk convergence rate fit");
  add_dataset_flags(rate, rate_opts);
  add_engine_flags(rate, rate_opts);
  // Theorem-style defaults: histogram on the schedule widths, fresh step
  // samples only, direct distribution sampling
  rate_opts.dataset = "sine";
  rate_opts.learner = "histogram";
  rate_opts.mode = "theoretical";
  rate_opts.pool_size = 0;
  rate_opts.recycle_labeled = 0;
  rate_opts.recycle_unlabeled = 0;
  rate->get_option("--dataset")->default_str("sine");
  rate->get_option("--learner")->default_str("histogram");
  rate->get_option("--mode")->default_str("theoretical");
  rate->get_option("--pool-size")->default_str("0");
  rate->get_option("--recycle-labeled")->default_str("0");
  rate->get_option("--recycle-unlabeled")->default_str("0");
  rate->add_option("--d", rate_opts.rate_dim, "sine oracle dimension")->capture_default_str();
  rate->add_option("--budgets", rate_opts.budgets, "ascending comma-separated budgets")
      ->default_val(std::string("500,1000,2000,4000,8000,16000"));
  rate->add_option("--repeats", rate_opts.repeats, "seeds per budget")->capture_default_str();
  rate->add_option("--out", rate_opts.out, "output JSON file");

  CLI::App* gen = app.add_subcommand("gen-data", "write a synthetic dataset as CSV");
  gen->add_option("--dataset", gen_opts.dataset, "sine|dasgupta1|easyhard2|gauss3")
      ->capture_default_str();
  gen->add_option("--pool-size", gen_opts.pool_size, "number of points")->required();
  gen->add_option("--seed", gen_opts.seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", gen_opts.out, "output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (run->parsed()) return cmd_run(run_opts);
  if (curve->parsed()) return cmd_curve(curve_opts);
  if (rate->parsed()) return cmd_rate_check(rate_opts);
  if (gen->parsed()) return cmd_gen_data(gen_opts);
  return 1;
}
