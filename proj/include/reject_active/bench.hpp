#pragma once

#include <array>
#include <utility>

#include "reject_active/engine.hpp"

namespace ral {

struct CurvePoint {
  long long budget = 0;
  std::string mode;  // active | passive
  int repeats = 0;
  double precision_mean = 0.0;
  double precision_std = 0.0;
  std::optional<double> excess_mean;
  std::optional<double> excess_std;
  int aborts = 0;

  bool operator==(const CurvePoint&) const = default;
};

struct CurveCell {
  CurvePoint point;
  std::vector<Metrics> per_seed;
};

/// One active and one passive cell per budget; repeat i runs with seed
/// base.seed + i, paired across the two modes. Aborted runs still
/// contribute their metrics and are counted in `aborts`.
std::vector<CurveCell> learning_curve(const EngineConfig& base, const DatasetSpec& dataset,
                                      const std::vector<long long>& budgets, int repeats,
                                      bool parallel = true);

std::vector<CurvePoint> curve_points(const std::vector<CurveCell>& cells);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::array<double, 2>> points;  // (log budget, log excess risk)

  bool operator==(const RateFit&) const = default;
};

/// Least squares of ln(excess) on ln(N). Non-positive excess values are
/// floored to machine epsilon with a warning; fewer than 3 positive points
/// is an error.
RateFit rate_fit(const std::vector<std::pair<double, double>>& n_excess);

/// Active runs only; fits the log-log slope of the mean excess risk.
RateFit rate_check(const EngineConfig& base, const DatasetSpec& dataset,
                   const std::vector<long long>& budgets, int repeats, bool parallel = true);

// File emitters. Doubles are written in shortest round-trip form; identical
// records produce byte-identical files.
void write_run_json(const RunRecord& rec, const std::string& path);
void write_run_csv(const RunRecord& rec, const std::string& path);
void write_curve_csv(const std::vector<CurvePoint>& points, const std::string& path);
void write_curve_json(const std::vector<CurvePoint>& points, const std::string& path);
void write_rate_json(const RateFit& fit, const std::string& path);

RunRecord read_run_json(const std::string& path);
std::vector<CurvePoint> read_curve_json(const std::string& path);
RateFit read_rate_json(const std::string& path);

}  // namespace ral
