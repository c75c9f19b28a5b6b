#include "reject_active/engine.hpp"

#include <algorithm>
#include <cmath>

#include "reject_active/log.hpp"

namespace ral {

const char* to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::histogram: return "histogram";
    case LearnerKind::knn: return "knn";
    case LearnerKind::linear: return "linear";
  }
  return "?";
}

LearnerKind learner_from_string(const std::string& s) {
  if (s == "histogram") return LearnerKind::histogram;
  if (s == "knn") return LearnerKind::knn;
  if (s == "linear") return LearnerKind::linear;
  throw ConfigError("unknown learner '" + s + "' (expected histogram, knn or linear)");
}

namespace {

void validate_config(const EngineConfig& cfg, std::size_t oracle_dim) {
  const Schedule& s = cfg.schedule;
  if (s.budget < 4) {
    throw ConfigError("budget N must be at least 4");
  }
  if (s.n0 < 1 || s.n0 > s.budget) {
    throw ConfigError("schedule N0 must satisfy 1 <= N0 <= N");
  }
  if (!(s.c_n > 1.0)) {
    throw ConfigError("c_N must exceed 1");
  }
  if (s.mode == ScheduleMode::practical && !(s.c_eps > 0.0 && s.c_eps < 1.0)) {
    throw ConfigError("c_eps must lie in (0,1)");
  }
  if (s.mode == ScheduleMode::theoretical && !(s.delta > 0.0 && s.delta < 0.5)) {
    throw ConfigError("delta must lie in (0,1/2)");
  }
  if (s.d != oracle_dim) {
    throw ConfigError("schedule dimension " + std::to_string(s.d) +
                      " does not match the oracle dimension " + std::to_string(oracle_dim));
  }
  if (cfg.m_k < 1) {
    throw ConfigError("M_k must be a positive integer");
  }
  if (cfg.u < 0.0) {
    throw ConfigError("randomization width u must be non-negative");
  }
  if (cfg.test_size < 0.0) {
    throw ConfigError("test size must be non-negative");
  }
  if (cfg.learner.kind == LearnerKind::knn && cfg.learner.knn_k < 1) {
    throw ConfigError("knn k must be positive");
  }
  if (cfg.learner.hist_r < 0.0 || cfg.learner.hist_r > 1.0) {
    throw ConfigError("histogram cell width override must lie in (0,1]");
  }
  if (cfg.learner.kind == LearnerKind::linear &&
      (cfg.learner.linear_steps < 0 || !(cfg.learner.linear_lr > 0.0))) {
    throw ConfigError("linear learner needs steps >= 0 and a positive learning rate");
  }
}

EstimatorPtr fit_stage(const EngineConfig& cfg, const Dataset& data, long long n_sched,
                       double region_mass) {
  switch (cfg.learner.kind) {
    case LearnerKind::histogram: {
      double r = cfg.learner.hist_r;
      if (r <= 0.0) {
        r = std::pow(static_cast<double>(std::max<long long>(n_sched, 1)),
                     -1.0 / (2.0 + static_cast<double>(data.d)));
      }
      r = std::min(r, 1.0);
      if (cfg.learner.hist_form == HistForm::exact_marginal) {
        return hist_fit(data, r, HistForm::exact_marginal, region_mass,
                        &UniformMarginal::instance());
      }
      return hist_fit(data, r);
    }
    case LearnerKind::knn:
      return knn_fit(data, cfg.learner.knn_k);
    case LearnerKind::linear:
      return linear_fit(data, cfg.learner.linear_steps, cfg.learner.linear_lr);
  }
  throw ConfigError("unknown learner");
}

Dataset labeled_dataset(std::size_t d, const std::vector<DrawnPoint>& drawn) {
  Dataset out;
  out.d = d;
  for (const auto& p : drawn) {
    out.points.push_back(LabeledPoint{p.x, p.label.value()});
  }
  return out;
}

const char* abort_reason_name(RunAbort::Reason reason) {
  return reason == RunAbort::Reason::region_starvation ? "region starvation" : "pool exhaustion";
}

}  // namespace

PiecewiseModel::Prediction PiecewiseModel::predict(std::span<const double> x) const {
  if (stages.empty()) {
    throw InputError("prediction on a model with no fitted stage");
  }
  const auto& thresholds = chain.stages();
  const std::size_t last = stages.size() - 1;
  std::size_t stop = last;
  for (std::size_t j = 0; j < last && j < thresholds.size(); ++j) {
    const auto& lambda = thresholds[j].lambda;
    if (!lambda.has_value() || stages[j]->score(x) > *lambda) {
      stop = j;  // x left the chain at stage j
      break;
    }
  }
  Prediction out;
  out.eta = stages[stop]->predict_eta(x);
  out.label = out.eta >= 0.5 ? 1 : 0;
  out.stage = static_cast<int>(stop);
  return out;
}

Metrics evaluate(const PiecewiseModel& model, const Dataset& test, const Oracle* truth) {
  if (test.empty()) {
    throw InputError("evaluation needs a non-empty test set");
  }
  const bool has_eta = truth != nullptr && truth->eta_true(test.points.front().x).has_value();
  long long correct = 0;
  double excess_sum = 0.0;
  for (const auto& p : test.points) {
    const auto pred = model.predict(p.x);
    correct += pred.label == p.y ? 1 : 0;
    if (has_eta) {
      const double eta = *truth->eta_true(p.x);
      const int bayes = eta >= 0.5 ? 1 : 0;
      if (pred.label != bayes) {
        excess_sum += std::abs(eta - 0.5);
      }
    }
  }
  const auto n = static_cast<double>(test.size());
  Metrics m;
  m.precision = static_cast<double>(correct) / n;
  if (has_eta) {
    m.excess_risk = 2.0 * excess_sum / n;
  }
  return m;
}

RunResult run_active(const EngineConfig& cfg, Oracle& oracle, Rng& rng,
                     const std::string& dataset_label) {
  validate_config(cfg, oracle.dim());
  const Schedule& sched = cfg.schedule;

  RunResult result;
  RunRecord& rec = result.record;
  rec.mode = "active";
  rec.learner = to_string(cfg.learner.kind);
  rec.dataset = dataset_label;
  rec.seed = cfg.seed;
  rec.budget = sched.budget;

  result.test = oracle.make_test_set(cfg.test_size, rng);

  BudgetTracker budget{sched.budget, 0};
  std::vector<EstimatorPtr> stages;
  RegionChain chain;
  Dataset labeled_all;
  labeled_all.d = oracle.dim();
  std::vector<std::vector<double>> carry;  // unlabeled survivors of the previous step
  double region_mass = 1.0;                // Pi(A_k) under the nominal rejection rates

  // initialization: N0 labels from the plain marginal
  Dataset init_data;
  try {
    auto drawn = sample_conditional(oracle, chain, static_cast<std::size_t>(sched.n0), cfg.u, rng,
                                    /*labeled=*/true);
    budget.charge(static_cast<long long>(drawn.size()));
    init_data = labeled_dataset(oracle.dim(), drawn);
  } catch (const SampleAbort& e) {
    budget.charge(e.accepted);
    init_data = labeled_dataset(oracle.dim(), e.partial);
    rec.incomplete = true;
    rec.abort_reason = std::string(abort_reason_name(e.reason)) + " during initialization";
  }
  rec.steps.push_back(StepRecord{0, sched.n0, Schedule::eps0, 1.0, std::nullopt,
                                 static_cast<long long>(init_data.size()), budget.used});
  if (init_data.empty()) {
    rec.budget_used = budget.used;
    result.model = PiecewiseModel{{}, RegionChain{}};
    return result;  // nothing labeled at all; no model, no metrics
  }
  stages.push_back(fit_stage(cfg, init_data, sched.n0, region_mass));
  labeled_all = init_data;

  long long n_prev = sched.n0;
  for (int k = 1; !rec.incomplete; ++k) {
    const ScheduleStep step = schedule_step(sched, k, n_prev);
    const auto n_req = static_cast<long long>(std::floor(static_cast<double>(step.n_k) * step.eps_k));
    if (n_req <= 0) {
      break;  // floor(N_k eps_k) = 0: the step would request nothing
    }
    if (!budget.can_charge(n_req)) {
      break;  // Algorithm 1 budget test
    }

    // M_k conditional candidates on A_{k-1}, recycling previous survivors
    std::vector<std::vector<double>> candidates;
    if (cfg.recycle_unlabeled) {
      candidates = std::move(carry);
    }
    carry.clear();
    if (candidates.size() > static_cast<std::size_t>(cfg.m_k)) {
      candidates.resize(static_cast<std::size_t>(cfg.m_k));
    }
    const auto fresh_needed = static_cast<std::size_t>(cfg.m_k) - candidates.size();
    if (fresh_needed > 0) {
      try {
        auto drawn = sample_conditional(oracle, chain, fresh_needed, cfg.u, rng, /*labeled=*/false);
        for (auto& p : drawn) {
          candidates.push_back(std::move(p.x));
        }
      } catch (const SampleAbort& e) {
        rec.incomplete = true;
        rec.abort_reason = std::string(abort_reason_name(e.reason)) +
                           " while sampling unlabeled candidates at step " + std::to_string(k);
        break;
      }
    }

    ExtendResult ext = region_extend(chain, stages.back(), candidates, step.eps_k, cfg.u, rng);
    const double eps_hat =
        static_cast<double>(ext.survivors.size()) / static_cast<double>(candidates.size());
    if (!ext.lambda.has_value()) {
      // empty region: record the degenerate step and stop iterating
      rec.steps.push_back(StepRecord{k, step.n_k, step.eps_k, eps_hat, std::nullopt, 0, budget.used});
      break;
    }

    std::vector<DrawnPoint> drawn;
    try {
      drawn = sample_conditional(oracle, ext.chain, static_cast<std::size_t>(n_req), cfg.u, rng,
                                 /*labeled=*/true);
    } catch (const SampleAbort& e) {
      budget.charge(e.accepted);
      rec.steps.push_back(
          StepRecord{k, step.n_k, step.eps_k, eps_hat, ext.lambda, e.accepted, budget.used});
      rec.incomplete = true;
      rec.abort_reason = std::string(abort_reason_name(e.reason)) +
                         " while requesting labels at step " + std::to_string(k);
      break;  // the partially labeled step is dropped; the chain is not extended
    }
    budget.charge(n_req);

    Dataset fit_data = labeled_dataset(oracle.dim(), drawn);
    if (cfg.recycle_labeled) {
      for (const auto& p : labeled_all.points) {
        if (ext.chain.contains(p.x)) {
          fit_data.points.push_back(p);
        }
      }
    }
    region_mass *= step.eps_k;
    stages.push_back(fit_stage(cfg, fit_data, step.n_k, region_mass));
    chain = std::move(ext.chain);
    for (const auto& p : drawn) {
      labeled_all.points.push_back(LabeledPoint{p.x, p.label.value()});
    }
    if (cfg.recycle_unlabeled) {
      for (std::size_t idx : ext.survivors) {
        carry.push_back(candidates[idx]);
      }
    }

    rec.steps.push_back(
        StepRecord{k, step.n_k, step.eps_k, eps_hat, ext.lambda, n_req, budget.used});
    log_msg(LogLevel::debug, "step %d: N_k=%lld eps=%.6f eps_hat=%.6f lambda=%.6f labels=%lld used=%lld",
            k, step.n_k, step.eps_k, eps_hat, *ext.lambda, n_req, budget.used);
    n_prev = step.n_k;
  }

  result.model = PiecewiseModel{std::move(stages), chain};
  rec.budget_used = budget.used;
  rec.num_stages = result.model.stages.size();
  for (const auto& st : chain.stages()) {
    rec.lambdas.push_back(st.lambda.value());
  }
  rec.metrics = evaluate(result.model, result.test, &oracle);
  return result;
}

RunResult run_passive(const EngineConfig& cfg, Oracle& oracle, Rng& rng,
                      const std::string& dataset_label) {
  validate_config(cfg, oracle.dim());
  const Schedule& sched = cfg.schedule;

  RunResult result;
  RunRecord& rec = result.record;
  rec.mode = "passive";
  rec.learner = to_string(cfg.learner.kind);
  rec.dataset = dataset_label;
  rec.seed = cfg.seed;
  rec.budget = sched.budget;

  result.test = oracle.make_test_set(cfg.test_size, rng);

  const long long n = std::min(sched.budget, oracle.remaining());
  if (n < 1) {
    throw InputError("no labels available for the passive baseline");
  }
  auto drawn = sample_conditional(oracle, RegionChain{}, static_cast<std::size_t>(n), cfg.u, rng,
                                  /*labeled=*/true);
  BudgetTracker budget{sched.budget, 0};
  budget.charge(n);

  const Dataset data = labeled_dataset(oracle.dim(), drawn);
  PiecewiseModel model;
  model.stages.push_back(fit_stage(cfg, data, n, 1.0));
  result.model = std::move(model);

  if (n < sched.budget) {
    rec.incomplete = true;
    rec.abort_reason = "pool smaller than the budget";
  }
  rec.steps.push_back(StepRecord{0, n, Schedule::eps0, 1.0, std::nullopt, n, budget.used});
  rec.budget_used = budget.used;
  rec.num_stages = 1;
  rec.metrics = evaluate(result.model, result.test, &oracle);
  return result;
}

RunResult run_active(const EngineConfig& cfg, const DatasetSpec& dataset) {
  Rng rng(cfg.seed);
  auto oracle = make_oracle(dataset, rng);
  return run_active(cfg, *oracle, rng, dataset.label);
}

RunResult run_passive(const EngineConfig& cfg, const DatasetSpec& dataset) {
  Rng rng(cfg.seed);
  auto oracle = make_oracle(dataset, rng);
  return run_passive(cfg, *oracle, rng, dataset.label);
}

}  // namespace ral
