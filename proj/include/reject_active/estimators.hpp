#pragma once

#include <map>
#include <memory>
#include <span>
#include <vector>

#include "reject_active/core.hpp"

namespace ral {

/// Fitted regression-function estimator: eta(x) in [0,1] and the
/// score f(x) = max(eta(x), 1-eta(x)) in [1/2, 1]. Immutable after fitting.
class EtaEstimator {
 public:
  virtual ~EtaEstimator() = default;

  std::size_t dim() const { return d_; }
  double predict_eta(std::span<const double> x) const;
  double score(std::span<const double> x) const;

 protected:
  explicit EtaEstimator(std::size_t d) : d_(d) {}
  virtual double eta_impl(std::span<const double> x) const = 0;

 private:
  std::size_t d_;
};

using EstimatorPtr = std::shared_ptr<const EtaEstimator>;

enum class HistForm { count_ratio, exact_marginal };

/// Exact cell mass Pi(R_i) on the cubic partition with edge length r.
class Marginal {
 public:
  virtual ~Marginal() = default;
  virtual double cell_mass(std::span<const int> cell, double r) const = 0;
};

/// Uniform marginal on [0,1]^d; boundary cells may be narrower than r.
class UniformMarginal final : public Marginal {
 public:
  double cell_mass(std::span<const int> cell, double r) const override;
  static const UniformMarginal& instance();
};

class HistogramEstimator final : public EtaEstimator {
 public:
  HistogramEstimator(std::size_t d, double r, HistForm form,
                     std::map<std::vector<int>, double> cells);

  double cell_width() const { return r_; }
  HistForm form() const { return form_; }
  const std::map<std::vector<int>, double>& cells() const { return cells_; }

  // floor(x_i / r) per coordinate, with x_i = 1 folded into the top cell so
  // that the cells partition [0,1]^d exactly
  static std::vector<int> cell_of(std::span<const double> x, double r);

 protected:
  double eta_impl(std::span<const double> x) const override;

 private:
  double r_;
  HistForm form_;
  std::map<std::vector<int>, double> cells_;  // absent cell predicts 1/2
};

/// Histogram rule on the cubic partition with edge r.
/// count_ratio stores the per-cell label mean; exact_marginal stores
/// (region_mass / Pi(R_i)) * (1/N) * sum of labels in R_i, clamped to [0,1].
std::shared_ptr<const HistogramEstimator> hist_fit(const Dataset& samples, double r,
                                                   HistForm form = HistForm::count_ratio,
                                                   double region_mass = 1.0,
                                                   const Marginal* marginal = nullptr);

class KnnEstimator final : public EtaEstimator {
 public:
  KnnEstimator(Dataset training, int k);

  int k() const { return k_; }
  const Dataset& training() const { return training_; }

 protected:
  // fraction of the k nearest training points (Euclidean distance, ties
  // broken by lower training index) carrying label 1
  double eta_impl(std::span<const double> x) const override;

 private:
  Dataset training_;
  int k_;
};

/// k is clamped to the training-set size.
std::shared_ptr<const KnnEstimator> knn_fit(const Dataset& samples, int k);

class LinearEstimator final : public EtaEstimator {
 public:
  LinearEstimator(std::vector<double> weights, double intercept);

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }

 protected:
  double eta_impl(std::span<const double> x) const override;  // sigmoid(w.x + b)

 private:
  std::vector<double> weights_;
  double intercept_;
};

/// Full-batch gradient descent on the mean logistic loss, zero
/// initialization, fixed step count. Deterministic.
std::shared_ptr<const LinearEstimator> linear_fit(const Dataset& samples, int steps = 500,
                                                  double learning_rate = 0.5);

// mean logistic loss and its gradient; shared with the optimizer so the
// finite-difference check in the tests exercises the same code path
double logistic_loss(const Dataset& samples, std::span<const double> w, double b);
void logistic_grad(const Dataset& samples, std::span<const double> w, double b,
                   std::span<double> grad_w, double& grad_b);

}  // namespace ral
