#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reject_active/oracles.hpp"

namespace ral {

enum class LearnerKind { histogram, knn, linear };

const char* to_string(LearnerKind kind);
LearnerKind learner_from_string(const std::string& s);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::linear;
  int knn_k = 5;
  double hist_r = 0.0;  // 0 uses the schedule width N_k^(-1/(d+2))
  HistForm hist_form = HistForm::count_ratio;
  int linear_steps = 500;
  double linear_lr = 0.5;
};

struct EngineConfig {
  Schedule schedule;
  int m_k = 150;       // unlabeled conditional points per step
  double u = 1e-5;     // score randomization width
  LearnerConfig learner;
  bool recycle_labeled = true;
  bool recycle_unlabeled = true;
  std::uint64_t seed = 1;
  double test_size = 0.0;  // 0: 5000 fresh points (synthetic) or a 20% held-out split (pool)
};

/// Stage-wise model: x is classified by the first stage whose region it
/// leaves, or by the deepest estimator if it stays in the whole chain.
struct PiecewiseModel {
  std::vector<EstimatorPtr> stages;
  RegionChain chain;  // stages.size() == chain.depth() + 1 for non-degenerate runs

  struct Prediction {
    double eta = 0.5;
    int label = 0;
    int stage = 0;
  };
  Prediction predict(std::span<const double> x) const;
};

struct StepRecord {
  int k = 0;
  long long n_k = 0;
  double eps_k = 1.0;
  double eps_hat_k = 1.0;
  std::optional<double> lambda_k;  // nullopt: EMPTY, or the init row
  long long labels_requested = 0;
  long long budget_used = 0;

  bool operator==(const StepRecord&) const = default;
};

struct Metrics {
  double precision = 0.0;
  std::optional<double> excess_risk;

  bool operator==(const Metrics&) const = default;
};

struct RunRecord {
  std::string mode;     // active | passive
  std::string learner;  // histogram | knn | linear
  std::string dataset;
  std::uint64_t seed = 0;
  long long budget = 0;
  long long budget_used = 0;
  bool incomplete = false;
  std::string abort_reason;
  std::vector<StepRecord> steps;
  Metrics metrics;
  std::size_t num_stages = 0;
  std::vector<double> lambdas;  // adopted thresholds, in step order

  bool operator==(const RunRecord&) const = default;
};

struct RunResult {
  RunRecord record;
  PiecewiseModel model;
  Dataset test;
};

/// precision = matched test labels; excess risk (when the oracle knows eta)
/// = (2/n) sum |eta(x_i) - 1/2| 1{g_hat(x_i) != g*(x_i)}.
Metrics evaluate(const PiecewiseModel& model, const Dataset& test, const Oracle* truth);

RunResult run_active(const EngineConfig& cfg, const DatasetSpec& dataset);
RunResult run_passive(const EngineConfig& cfg, const DatasetSpec& dataset);

// lower-level entry points over an existing oracle (the rng carries all
// randomness; callers own seeding)
RunResult run_active(const EngineConfig& cfg, Oracle& oracle, Rng& rng,
                     const std::string& dataset_label);
RunResult run_passive(const EngineConfig& cfg, Oracle& oracle, Rng& rng,
                      const std::string& dataset_label);

}  // namespace ral
