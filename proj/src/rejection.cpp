#include "reject_active/rejection.hpp"

#include <algorithm>
#include <cmath>

namespace ral {

bool RegionChain::contains(std::span<const double> x) const {
  return contains_prefix(x, stages_.size());
}

bool RegionChain::contains_prefix(std::span<const double> x, std::size_t k) const {
  for (std::size_t j = 0; j < k && j < stages_.size(); ++j) {
    const auto& stage = stages_[j];
    if (!stage.lambda.has_value()) {
      return false;
    }
    if (stage.estimator->score(x) > *stage.lambda) {
      return false;
    }
  }
  return true;
}

bool RegionChain::contains_sampling(std::span<const double> x, double u, Rng& rng,
                                    std::vector<double>* zetas_out) const {
  if (zetas_out) {
    zetas_out->clear();
  }
  std::uniform_real_distribution<double> zeta(0.0, u);
  for (const auto& stage : stages_) {
    if (!stage.lambda.has_value()) {
      return false;
    }
    const double z = u > 0.0 ? zeta(rng) : 0.0;
    if (zetas_out) {
      zetas_out->push_back(z);
    }
    if (stage.estimator->score(x) + z > *stage.lambda) {
      return false;
    }
  }
  return true;
}

std::vector<double> randomize_scores(std::span<const double> scores, double u, Rng& rng) {
  if (u < 0.0) {
    throw ConfigError("randomization width u must be non-negative");
  }
  std::vector<double> out(scores.begin(), scores.end());
  if (u > 0.0) {
    std::uniform_real_distribution<double> zeta(0.0, u);
    for (auto& v : out) {
      v += zeta(rng);
    }
  }
  return out;
}

std::optional<double> empirical_quantile(std::span<const double> values, double eps) {
  if (values.empty()) {
    throw InputError("empirical quantile of an empty sample");
  }
  if (eps < 0.0 || eps > 1.0) {
    throw InputError("quantile level must lie in [0,1]");
  }
  const auto m = static_cast<double>(values.size());
  const auto kth = static_cast<std::size_t>(std::floor(eps * m));
  if (kth == 0) {
    return std::nullopt;
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted[kth - 1];
}

ExtendResult region_extend(const RegionChain& chain, const EstimatorPtr& est,
                           const std::vector<std::vector<double>>& candidates, double eps,
                           double u, Rng& rng) {
  if (candidates.empty()) {
    throw InputError("region extension needs a non-empty conditional sample");
  }
  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scores[i] = est->score(candidates[i]);
  }
  const std::vector<double> randomized = randomize_scores(scores, u, rng);
  const std::optional<double> lambda = empirical_quantile(randomized, eps);

  ExtendResult out;
  out.lambda = lambda;
  if (lambda.has_value()) {
    for (std::size_t i = 0; i < randomized.size(); ++i) {
      if (randomized[i] <= *lambda) {
        out.survivors.push_back(i);
      }
    }
  }
  std::vector<RegionStage> stages = chain.stages();
  stages.push_back(RegionStage{est, lambda});
  out.chain = RegionChain(std::move(stages));
  return out;
}

}  // namespace ral
