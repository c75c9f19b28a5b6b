#include "reject_active.h"

#include <cstring>
#include <string>

#include "reject_active/bench.hpp"

using namespace ral;

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RAL_OK;
  } catch (const ConfigError& e) {
    return set_error(RAL_ERR_CONFIG, e.what());
  } catch (const LoadError& e) {
    return set_error(RAL_ERR_LOAD, e.what());
  } catch (const IoError& e) {
    return set_error(RAL_ERR_IO, e.what());
  } catch (const InputError& e) {
    return set_error(RAL_ERR_INPUT, e.what());
  } catch (const RunAbort& e) {
    return set_error(RAL_ERR_RUNTIME, e.what());
  } catch (const std::exception& e) {
    return set_error(RAL_ERR_RUNTIME, e.what());
  }
}

// resolved into an EngineConfig once the dataset (budget, d) is known
struct ConfigState {
  long long budget = 5000;
  ScheduleMode mode = ScheduleMode::practical;
  double c_n = 1.2;
  double c_eps = 0.95;
  double delta = 0.05;
  int n0_mult = 0;  // 0: mode default (practical 2, theoretical 1)
  LearnerConfig learner;
  int m_k = 150;
  double u = 1e-5;
  bool recycle_labeled = true;
  bool recycle_unlabeled = true;
  std::uint64_t seed = 1;
  double test_size = 0.0;
};

EngineConfig resolve(const ConfigState& st, std::size_t d) {
  const int mult = st.n0_mult > 0 ? st.n0_mult : (st.mode == ScheduleMode::practical ? 2 : 1);
  EngineConfig cfg;
  cfg.schedule = schedule_init(st.budget, st.mode, st.c_n, st.c_eps, st.delta, d, mult);
  cfg.m_k = st.m_k;
  cfg.u = st.u;
  cfg.learner = st.learner;
  cfg.recycle_labeled = st.recycle_labeled;
  cfg.recycle_unlabeled = st.recycle_unlabeled;
  cfg.seed = st.seed;
  cfg.test_size = st.test_size;
  return cfg;
}

}  // namespace

struct ral_config {
  ConfigState state;
};

struct ral_dataset {
  DatasetSpec spec;
};

struct ral_result {
  RunResult result;
};

struct ral_curve {
  std::vector<CurvePoint> points;
};

struct ral_rate {
  RateFit fit;
};

extern "C" {

const char* ral_version(void) { return "1.0.0"; }

const char* ral_last_error(void) { return g_last_error.c_str(); }

ral_config* ral_config_new(void) { return new ral_config(); }

void ral_config_free(ral_config* cfg) { delete cfg; }

#define RAL_REQUIRE(ptr)                                        \
  do {                                                          \
    if (!(ptr)) return set_error(RAL_ERR_INPUT, "null handle"); \
  } while (0)

int ral_config_set_budget(ral_config* cfg, long long budget) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (budget < 4) throw ConfigError("budget N must be at least 4");
    cfg->state.budget = budget;
  });
}

int ral_config_set_mode(ral_config* cfg, const char* mode) {
  RAL_REQUIRE(cfg);
  RAL_REQUIRE(mode);
  return guarded([&] { cfg->state.mode = schedule_mode_from_string(mode); });
}

int ral_config_set_learner(ral_config* cfg, const char* learner) {
  RAL_REQUIRE(cfg);
  RAL_REQUIRE(learner);
  return guarded([&] { cfg->state.learner.kind = learner_from_string(learner); });
}

int ral_config_set_knn_k(ral_config* cfg, int k) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (k < 1) throw ConfigError("knn k must be positive");
    cfg->state.learner.knn_k = k;
  });
}

int ral_config_set_hist_r(ral_config* cfg, double r) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (r < 0.0 || r > 1.0) throw ConfigError("histogram cell width must lie in (0,1], or 0 for the schedule default");
    cfg->state.learner.hist_r = r;
  });
}

int ral_config_set_cn(ral_config* cfg, double c_n) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (!(c_n > 1.0)) throw ConfigError("c_N must exceed 1");
    cfg->state.c_n = c_n;
  });
}

int ral_config_set_ceps(ral_config* cfg, double c_eps) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (!(c_eps > 0.0 && c_eps < 1.0)) throw ConfigError("c_eps must lie in (0,1)");
    cfg->state.c_eps = c_eps;
  });
}

int ral_config_set_delta(ral_config* cfg, double delta) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("delta must lie in (0,1/2)");
    cfg->state.delta = delta;
  });
}

int ral_config_set_n0_mult(ral_config* cfg, int multiplier) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (multiplier < 0) throw ConfigError("N0 multiplier must be positive, or 0 for the mode default");
    cfg->state.n0_mult = multiplier;
  });
}

int ral_config_set_mk(ral_config* cfg, int m_k) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (m_k < 1) throw ConfigError("M_k must be positive");
    cfg->state.m_k = m_k;
  });
}

int ral_config_set_u(ral_config* cfg, double u) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (u < 0.0) throw ConfigError("u must be non-negative");
    cfg->state.u = u;
  });
}

int ral_config_set_recycle(ral_config* cfg, int labeled, int unlabeled) {
  RAL_REQUIRE(cfg);
  cfg->state.recycle_labeled = labeled != 0;
  cfg->state.recycle_unlabeled = unlabeled != 0;
  g_last_error.clear();
  return RAL_OK;
}

int ral_config_set_seed(ral_config* cfg, unsigned long long seed) {
  RAL_REQUIRE(cfg);
  cfg->state.seed = seed;
  g_last_error.clear();
  return RAL_OK;
}

int ral_config_set_test_size(ral_config* cfg, double test_size) {
  RAL_REQUIRE(cfg);
  return guarded([&] {
    if (test_size < 0.0) throw ConfigError("test size must be non-negative");
    cfg->state.test_size = test_size;
  });
}

int ral_dataset_synthetic(const char* name, int dim, double sigma, double omega, double phi,
                          long long pool_size, ral_dataset** out) {
  RAL_REQUIRE(name);
  RAL_REQUIRE(out);
  return guarded([&] {
    const SynthName synth = synth_name_from_string(name);
    const std::size_t d = dim > 0 ? static_cast<std::size_t>(dim) : 2;
    const double s = sigma > 0.0 ? sigma : 0.3;
    auto* dataset = new ral_dataset{make_synthetic_spec(synth, d, s, pool_size, omega, phi)};
    *out = dataset;
  });
}

int ral_dataset_csv(const char* path, const char* label_col, int normalize, ral_dataset** out) {
  RAL_REQUIRE(path);
  RAL_REQUIRE(out);
  return guarded([&] {
    auto* dataset =
        new ral_dataset{make_csv_spec(path, label_col ? label_col : "", normalize != 0)};
    *out = dataset;
  });
}

void ral_dataset_free(ral_dataset* dataset) { delete dataset; }

int ral_dataset_dim(const ral_dataset* dataset) {
  if (!dataset) return -1;
  return dataset->spec.is_csv ? static_cast<int>(dataset->spec.csv->data->d)
                              : static_cast<int>(dataset->spec.synth.dim);
}

long long ral_dataset_size(const ral_dataset* dataset) {
  if (!dataset) return -1;
  return dataset->spec.is_csv ? static_cast<long long>(dataset->spec.csv->data->size())
                              : dataset->spec.pool_size;
}

int ral_dataset_write_csv(const ral_dataset* dataset, long long n, unsigned long long seed,
                          const char* path) {
  RAL_REQUIRE(dataset);
  RAL_REQUIRE(path);
  return guarded([&] {
    if (dataset->spec.is_csv) {
      throw ConfigError("dataset generation needs a synthetic dataset");
    }
    Rng rng(seed);
    SyntheticOracle oracle(dataset->spec.synth);
    write_csv_dataset(materialize(oracle, n, rng), path);
  });
}

namespace {

std::size_t dataset_dim(const ral_dataset* dataset) {
  return dataset->spec.is_csv ? dataset->spec.csv->data->d : dataset->spec.synth.dim;
}

int run_common(const ral_config* cfg, const ral_dataset* dataset, ral_result** out, bool active) {
  if (!cfg || !dataset || !out) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] {
    const EngineConfig engine_cfg = resolve(cfg->state, dataset_dim(dataset));
    auto* result = new ral_result{active ? run_active(engine_cfg, dataset->spec)
                                         : run_passive(engine_cfg, dataset->spec)};
    *out = result;
  });
}

}  // namespace

int ral_run_active(const ral_config* cfg, const ral_dataset* dataset, ral_result** out) {
  return run_common(cfg, dataset, out, true);
}

int ral_run_passive(const ral_config* cfg, const ral_dataset* dataset, ral_result** out) {
  return run_common(cfg, dataset, out, false);
}

void ral_result_free(ral_result* result) { delete result; }

long long ral_result_budget_used(const ral_result* result) {
  return result ? result->result.record.budget_used : -1;
}

int ral_result_incomplete(const ral_result* result) {
  return result && result->result.record.incomplete ? 1 : 0;
}

const char* ral_result_abort_reason(const ral_result* result) {
  return result ? result->result.record.abort_reason.c_str() : "";
}

int ral_result_num_steps(const ral_result* result) {
  return result ? static_cast<int>(result->result.record.steps.size()) : -1;
}

int ral_result_step(const ral_result* result, int index, ral_step_info* out) {
  if (!result || !out) return set_error(RAL_ERR_INPUT, "null handle");
  const auto& steps = result->result.record.steps;
  if (index < 0 || static_cast<std::size_t>(index) >= steps.size()) {
    return set_error(RAL_ERR_INPUT, "step index out of range");
  }
  const StepRecord& s = steps[static_cast<std::size_t>(index)];
  out->k = s.k;
  out->n_k = s.n_k;
  out->eps = s.eps_k;
  out->eps_hat = s.eps_hat_k;
  out->has_lambda = s.lambda_k.has_value() ? 1 : 0;
  out->lambda = s.lambda_k.value_or(0.0);
  out->labels_requested = s.labels_requested;
  out->budget_used = s.budget_used;
  g_last_error.clear();
  return RAL_OK;
}

int ral_result_metrics(const ral_result* result, double* precision, double* excess_risk,
                       int* has_excess) {
  if (!result) return set_error(RAL_ERR_INPUT, "null handle");
  const Metrics& m = result->result.record.metrics;
  if (precision) *precision = m.precision;
  if (excess_risk) *excess_risk = m.excess_risk.value_or(0.0);
  if (has_excess) *has_excess = m.excess_risk.has_value() ? 1 : 0;
  g_last_error.clear();
  return RAL_OK;
}

int ral_result_num_stages(const ral_result* result) {
  return result ? static_cast<int>(result->result.model.stages.size()) : -1;
}

int ral_result_predict(const ral_result* result, const double* x, int d, double* eta, int* label,
                       int* stage) {
  if (!result || !x) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] {
    const auto pred =
        result->result.model.predict(std::span<const double>(x, static_cast<std::size_t>(d)));
    if (eta) *eta = pred.eta;
    if (label) *label = pred.label;
    if (stage) *stage = pred.stage;
  });
}

int ral_result_write_json(const ral_result* result, const char* path) {
  if (!result || !path) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] { write_run_json(result->result.record, path); });
}

int ral_result_write_csv(const ral_result* result, const char* path) {
  if (!result || !path) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] { write_run_csv(result->result.record, path); });
}

int ral_curve_run(const ral_config* cfg, const ral_dataset* dataset, const long long* budgets,
                  int n_budgets, int repeats, ral_curve** out) {
  if (!cfg || !dataset || !budgets || !out) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] {
    std::vector<long long> list(budgets, budgets + n_budgets);
    if (list.empty()) throw ConfigError("at least one budget is required");
    const EngineConfig engine_cfg = resolve(cfg->state, dataset_dim(dataset));
    auto* curve = new ral_curve{curve_points(learning_curve(engine_cfg, dataset->spec, list, repeats))};
    *out = curve;
  });
}

void ral_curve_free(ral_curve* curve) { delete curve; }

int ral_curve_num_points(const ral_curve* curve) {
  return curve ? static_cast<int>(curve->points.size()) : -1;
}

int ral_curve_point_at(const ral_curve* curve, int index, ral_curve_point* out) {
  if (!curve || !out) return set_error(RAL_ERR_INPUT, "null handle");
  if (index < 0 || static_cast<std::size_t>(index) >= curve->points.size()) {
    return set_error(RAL_ERR_INPUT, "curve point index out of range");
  }
  const CurvePoint& p = curve->points[static_cast<std::size_t>(index)];
  out->budget = p.budget;
  out->is_active = p.mode == "active" ? 1 : 0;
  out->repeats = p.repeats;
  out->precision_mean = p.precision_mean;
  out->precision_std = p.precision_std;
  out->has_excess = p.excess_mean.has_value() ? 1 : 0;
  out->excess_mean = p.excess_mean.value_or(0.0);
  out->excess_std = p.excess_std.value_or(0.0);
  out->aborts = p.aborts;
  g_last_error.clear();
  return RAL_OK;
}

int ral_curve_write_csv(const ral_curve* curve, const char* path) {
  if (!curve || !path) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] { write_curve_csv(curve->points, path); });
}

int ral_curve_write_json(const ral_curve* curve, const char* path) {
  if (!curve || !path) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] { write_curve_json(curve->points, path); });
}

int ral_rate_check(const ral_config* cfg, const ral_dataset* dataset, const long long* budgets,
                   int n_budgets, int repeats, ral_rate** out) {
  if (!cfg || !dataset || !budgets || !out) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] {
    std::vector<long long> list(budgets, budgets + n_budgets);
    const EngineConfig engine_cfg = resolve(cfg->state, dataset_dim(dataset));
    auto* rate = new ral_rate{rate_check(engine_cfg, dataset->spec, list, repeats)};
    *out = rate;
  });
}

void ral_rate_free(ral_rate* rate) { delete rate; }

int ral_rate_stats(const ral_rate* rate, double* slope, double* intercept, double* r_squared) {
  if (!rate) return set_error(RAL_ERR_INPUT, "null handle");
  if (slope) *slope = rate->fit.slope;
  if (intercept) *intercept = rate->fit.intercept;
  if (r_squared) *r_squared = rate->fit.r_squared;
  g_last_error.clear();
  return RAL_OK;
}

int ral_rate_write_json(const ral_rate* rate, const char* path) {
  if (!rate || !path) return set_error(RAL_ERR_INPUT, "null handle");
  return guarded([&] { write_rate_json(rate->fit, path); });
}

}  // extern "C"
