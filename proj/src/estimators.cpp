#include "reject_active/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ral {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double EtaEstimator::predict_eta(std::span<const double> x) const {
  if (x.size() != d_) {
    throw InputError("query dimension " + std::to_string(x.size()) +
                     " does not match estimator dimension " + std::to_string(d_));
  }
  return clamp01(eta_impl(x));
}

double EtaEstimator::score(std::span<const double> x) const {
  const double eta = predict_eta(x);
  return std::max(eta, 1.0 - eta);
}

double UniformMarginal::cell_mass(std::span<const int> cell, double r) const {
  double mass = 1.0;
  for (int c : cell) {
    const double lo = c * r;
    const double hi = std::min((c + 1) * r, 1.0);
    mass *= std::max(0.0, hi - lo);
  }
  return mass;
}

const UniformMarginal& UniformMarginal::instance() {
  static const UniformMarginal m;
  return m;
}

HistogramEstimator::HistogramEstimator(std::size_t d, double r, HistForm form,
                                       std::map<std::vector<int>, double> cells)
    : EtaEstimator(d), r_(r), form_(form), cells_(std::move(cells)) {}

std::vector<int> HistogramEstimator::cell_of(std::span<const double> x, double r) {
  const int last = static_cast<int>(std::ceil(1.0 / r)) - 1;
  std::vector<int> cell(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    int idx = static_cast<int>(std::floor(x[i] / r));
    idx = std::clamp(idx, 0, last);
    cell[i] = idx;
  }
  return cell;
}

double HistogramEstimator::eta_impl(std::span<const double> x) const {
  const auto it = cells_.find(cell_of(x, r_));
  return it == cells_.end() ? 0.5 : it->second;
}

std::shared_ptr<const HistogramEstimator> hist_fit(const Dataset& samples, double r, HistForm form,
                                                   double region_mass, const Marginal* marginal) {
  if (!(r > 0.0 && r <= 1.0)) {
    throw ConfigError("histogram cell width must lie in (0,1], got " + std::to_string(r));
  }
  if (samples.empty()) {
    throw InputError("cannot fit a histogram on an empty sample");
  }
  struct Tally {
    long long count = 0;
    long long ones = 0;
  };
  std::map<std::vector<int>, Tally> tallies;
  for (const auto& p : samples.points) {
    auto& t = tallies[HistogramEstimator::cell_of(p.x, r)];
    t.count += 1;
    t.ones += p.y;
  }
  std::map<std::vector<int>, double> cells;
  if (form == HistForm::count_ratio) {
    for (const auto& [cell, t] : tallies) {
      cells[cell] = static_cast<double>(t.ones) / static_cast<double>(t.count);
    }
  } else {
    const Marginal& m = marginal ? *marginal : UniformMarginal::instance();
    const auto n = static_cast<double>(samples.size());
    for (const auto& [cell, t] : tallies) {
      const double mass = m.cell_mass(cell, r);
      if (mass <= 0.0) {
        throw ConfigError("marginal assigns zero mass to a populated cell");
      }
      cells[cell] = clamp01(region_mass / mass * static_cast<double>(t.ones) / n);
    }
  }
  return std::make_shared<const HistogramEstimator>(samples.d, r, form, std::move(cells));
}

KnnEstimator::KnnEstimator(Dataset training, int k) : EtaEstimator(training.d), training_(std::move(training)), k_(k) {}

double KnnEstimator::eta_impl(std::span<const double> x) const {
  const std::size_t n = training_.size();
  std::vector<std::pair<double, std::size_t>> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    const auto& t = training_.points[i].x;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double diff = x[j] - t[j];
      d2 += diff * diff;
    }
    order[i] = {d2, i};
  }
  const auto kth = order.begin() + k_;
  std::partial_sort(order.begin(), kth, order.end());
  long long ones = 0;
  for (int i = 0; i < k_; ++i) {
    ones += training_.points[order[i].second].y;
  }
  return static_cast<double>(ones) / static_cast<double>(k_);
}

std::shared_ptr<const KnnEstimator> knn_fit(const Dataset& samples, int k) {
  if (samples.empty()) {
    throw InputError("cannot fit k-NN on an empty sample");
  }
  if (k < 1) {
    throw ConfigError("k must be a positive integer");
  }
  const int k_eff = std::min<long long>(k, static_cast<long long>(samples.size()));
  return std::make_shared<const KnnEstimator>(samples, k_eff);
}

LinearEstimator::LinearEstimator(std::vector<double> weights, double intercept)
    : EtaEstimator(weights.size()), weights_(std::move(weights)), intercept_(intercept) {}

double LinearEstimator::eta_impl(std::span<const double> x) const {
  double z = intercept_;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    z += weights_[i] * x[i];
  }
  return sigmoid(z);
}

double logistic_loss(const Dataset& samples, std::span<const double> w, double b) {
  double total = 0.0;
  for (const auto& p : samples.points) {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) {
      z += w[i] * p.x[i];
    }
    // log(1 + exp(z)) - y*z, evaluated stably for either sign of z
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    total += softplus - p.y * z;
  }
  return total / static_cast<double>(samples.size());
}

void logistic_grad(const Dataset& samples, std::span<const double> w, double b,
                   std::span<double> grad_w, double& grad_b) {
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  for (const auto& p : samples.points) {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) {
      z += w[i] * p.x[i];
    }
    const double err = sigmoid(z) - p.y;
    for (std::size_t i = 0; i < w.size(); ++i) {
      grad_w[i] += err * p.x[i];
    }
    grad_b += err;
  }
  const auto n = static_cast<double>(samples.size());
  for (auto& g : grad_w) {
    g /= n;
  }
  grad_b /= n;
}

std::shared_ptr<const LinearEstimator> linear_fit(const Dataset& samples, int steps,
                                                  double learning_rate) {
  if (samples.empty()) {
    throw InputError("cannot fit a linear model on an empty sample");
  }
  if (steps < 0 || !(learning_rate > 0.0)) {
    throw ConfigError("linear fit needs steps >= 0 and a positive learning rate");
  }
  std::vector<double> w(samples.d, 0.0);
  double b = 0.0;
  std::vector<double> gw(samples.d);
  double gb = 0.0;
  for (int step = 0; step < steps; ++step) {
    logistic_grad(samples, w, b, gw, gb);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= learning_rate * gw[i];
    }
    b -= learning_rate * gb;
    if (!std::isfinite(b)) {
      throw Error("logistic training diverged to a non-finite model");
    }
  }
  return std::make_shared<const LinearEstimator>(std::move(w), b);
}

}  // namespace ral
