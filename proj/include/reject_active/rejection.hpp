#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "reject_active/estimators.hpp"

namespace ral {

using Rng = std::mt19937_64;

/// Width of the uniform score randomization; u = 0 disables it.
struct RandomizationConfig {
  double u = 1e-5;
};

/// One rejection stage: region A_{j+1} = {x in A_j : f_j(x) + zeta <= lambda}.
/// A missing lambda is the EMPTY sentinel (the stage admits nothing).
struct RegionStage {
  EstimatorPtr estimator;
  std::optional<double> lambda;
};

/// Nested uncertain regions A_0 (the whole space) down to A_L, encoded as
/// (score estimator, threshold) pairs. Immutable after each extension.
class RegionChain {
 public:
  RegionChain() = default;
  explicit RegionChain(std::vector<RegionStage> stages) : stages_(std::move(stages)) {}

  std::size_t depth() const { return stages_.size(); }
  const std::vector<RegionStage>& stages() const { return stages_; }

  /// Deterministic membership (zeta = 0) in the deepest region.
  bool contains(std::span<const double> x) const;

  /// Deterministic membership in A_k, i.e. only the first k stages.
  bool contains_prefix(std::span<const double> x, std::size_t k) const;

  /// Membership with a fresh zeta ~ U[0,u] per stage. When zetas_out is
  /// non-null it receives the draws made before the walk stopped.
  bool contains_sampling(std::span<const double> x, double u, Rng& rng,
                         std::vector<double>* zetas_out = nullptr) const;

 private:
  std::vector<RegionStage> stages_;
};

/// scores[i] + zeta_i with zeta_i i.i.d. uniform on [0,u]; order preserved.
std::vector<double> randomize_scores(std::span<const double> scores, double u, Rng& rng);

/// Largest t with F_hat(t) <= eps on the step CDF of `values`: the
/// floor(eps*M)-th smallest value (1-indexed), or nullopt (EMPTY) when
/// floor(eps*M) = 0. Throws InputError on an empty input.
std::optional<double> empirical_quantile(std::span<const double> values, double eps);

struct ExtendResult {
  RegionChain chain;             // input chain plus the new stage
  std::optional<double> lambda;  // EMPTY when floor(eps*M) = 0
  std::vector<std::size_t> survivors;  // candidate indices inside the new region
};

/// Scores the conditional candidates with `est`, randomizes with width u,
/// takes the empirical eps-quantile and appends (est, lambda) to the chain.
/// Survivors are the candidates whose randomized score is <= lambda.
ExtendResult region_extend(const RegionChain& chain, const EstimatorPtr& est,
                           const std::vector<std::vector<double>>& candidates, double eps,
                           double u, Rng& rng);

}  // namespace ral
