#include "reject_active/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>

#include <json.hpp>

#include "reject_active/log.hpp"

namespace ral {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) {
    sum += x;
  }
  return sum / static_cast<double>(v.size());
}

// population standard deviation, so a single repeat reports 0
double std_of(const std::vector<double>& v, double mean) {
  double sum = 0.0;
  for (double x : v) {
    sum += (x - mean) * (x - mean);
  }
  return std::sqrt(sum / static_cast<double>(v.size()));
}

std::vector<RunResult> repeat_runs(const EngineConfig& base, const DatasetSpec& dataset,
                                   long long budget, bool active, int repeats, bool parallel) {
  EngineConfig cfg = base;
  cfg.schedule = schedule_init(budget, base.schedule.mode, base.schedule.c_n, base.schedule.c_eps,
                               base.schedule.delta, base.schedule.d, base.schedule.n0_multiplier);
  std::vector<RunResult> out;
  out.reserve(static_cast<std::size_t>(repeats));
  auto one = [&](int i) {
    EngineConfig run_cfg = cfg;
    run_cfg.seed = base.seed + static_cast<std::uint64_t>(i);
    return active ? run_active(run_cfg, dataset) : run_passive(run_cfg, dataset);
  };
  if (parallel && repeats > 1) {
    std::vector<std::future<RunResult>> futures;
    futures.reserve(static_cast<std::size_t>(repeats));
    for (int i = 0; i < repeats; ++i) {
      futures.push_back(std::async(std::launch::async, one, i));
    }
    for (auto& f : futures) {
      out.push_back(f.get());
    }
  } else {
    for (int i = 0; i < repeats; ++i) {
      out.push_back(one(i));
    }
  }
  return out;
}

CurveCell make_cell(long long budget, const char* mode, const std::vector<RunResult>& runs) {
  CurveCell cell;
  cell.point.budget = budget;
  cell.point.mode = mode;
  cell.point.repeats = static_cast<int>(runs.size());
  std::vector<double> precisions;
  std::vector<double> excesses;
  bool all_have_excess = true;
  for (const auto& r : runs) {
    cell.per_seed.push_back(r.record.metrics);
    precisions.push_back(r.record.metrics.precision);
    if (r.record.metrics.excess_risk.has_value()) {
      excesses.push_back(*r.record.metrics.excess_risk);
    } else {
      all_have_excess = false;
    }
    cell.point.aborts += r.record.incomplete ? 1 : 0;
  }
  cell.point.precision_mean = mean_of(precisions);
  cell.point.precision_std = std_of(precisions, cell.point.precision_mean);
  if (all_have_excess && !excesses.empty()) {
    cell.point.excess_mean = mean_of(excesses);
    cell.point.excess_std = std_of(excesses, *cell.point.excess_mean);
  }
  return cell;
}

}  // namespace

std::vector<CurveCell> learning_curve(const EngineConfig& base, const DatasetSpec& dataset,
                                      const std::vector<long long>& budgets, int repeats,
                                      bool parallel) {
  if (budgets.empty() || !std::is_sorted(budgets.begin(), budgets.end())) {
    throw ConfigError("budgets must be a non-empty ascending list");
  }
  if (repeats < 1) {
    throw ConfigError("repeats must be at least 1");
  }
  std::vector<CurveCell> cells;
  for (long long budget : budgets) {
    for (bool active : {true, false}) {
      const char* mode = active ? "active" : "passive";
      log_msg(LogLevel::info, "curve: budget=%lld mode=%s repeats=%d", budget, mode, repeats);
      cells.push_back(make_cell(budget, mode, repeat_runs(base, dataset, budget, active, repeats, parallel)));
    }
  }
  return cells;
}

std::vector<CurvePoint> curve_points(const std::vector<CurveCell>& cells) {
  std::vector<CurvePoint> out;
  out.reserve(cells.size());
  for (const auto& c : cells) {
    out.push_back(c.point);
  }
  return out;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& n_excess) {
  if (n_excess.size() < 3) {
    throw InputError("rate fit needs at least 3 points");
  }
  long long positives = 0;
  for (const auto& [n, excess] : n_excess) {
    if (excess > 0.0) {
      ++positives;
    }
  }
  if (positives < 3) {
    throw InputError("rate fit needs at least 3 positive excess values");
  }
  RateFit fit;
  for (const auto& [n, excess] : n_excess) {
    double e = excess;
    if (e <= 0.0) {
      log_msg(LogLevel::error, "warning: non-positive excess %g at N=%g floored to machine epsilon",
              e, n);
      e = std::numeric_limits<double>::epsilon();
    }
    fit.points.push_back({std::log(n), std::log(e)});
  }
  const auto m = static_cast<double>(fit.points.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& p : fit.points) {
    mean_x += p[0];
    mean_y += p[1];
  }
  mean_x /= m;
  mean_y /= m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : fit.points) {
    sxx += (p[0] - mean_x) * (p[0] - mean_x);
    sxy += (p[0] - mean_x) * (p[1] - mean_y);
  }
  if (sxx <= 0.0) {
    throw InputError("rate fit needs at least two distinct budgets");
  }
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : fit.points) {
    const double fitted = fit.intercept + fit.slope * p[0];
    ss_res += (p[1] - fitted) * (p[1] - fitted);
    ss_tot += (p[1] - mean_y) * (p[1] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

RateFit rate_check(const EngineConfig& base, const DatasetSpec& dataset,
                   const std::vector<long long>& budgets, int repeats, bool parallel) {
  if (budgets.size() < 3) {
    throw ConfigError("rate check needs at least 3 budgets");
  }
  if (!std::is_sorted(budgets.begin(), budgets.end())) {
    throw ConfigError("budgets must be ascending");
  }
  std::vector<std::pair<double, double>> points;
  for (long long budget : budgets) {
    log_msg(LogLevel::info, "rate check: budget=%lld repeats=%d", budget, repeats);
    const auto runs = repeat_runs(base, dataset, budget, /*active=*/true, repeats, parallel);
    double sum = 0.0;
    for (const auto& r : runs) {
      if (!r.record.metrics.excess_risk.has_value()) {
        throw ConfigError("rate check needs a dataset with a known regression function");
      }
      sum += *r.record.metrics.excess_risk;
    }
    points.emplace_back(static_cast<double>(budget), sum / static_cast<double>(runs.size()));
  }
  return rate_fit(points);
}

// ---------------------------------------------------------------------------
// serialization

using nlohmann::json;

namespace {

json opt_to_json(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

std::optional<double> opt_from_json(const json& j) {
  return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

json step_to_json(const StepRecord& s) {
  return json{{"k", s.k},
              {"N_k", s.n_k},
              {"eps_k", s.eps_k},
              {"eps_hat_k", s.eps_hat_k},
              {"lambda_k", opt_to_json(s.lambda_k)},
              {"labels_requested", s.labels_requested},
              {"budget_used", s.budget_used}};
}

StepRecord step_from_json(const json& j) {
  StepRecord s;
  s.k = j.at("k").get<int>();
  s.n_k = j.at("N_k").get<long long>();
  s.eps_k = j.at("eps_k").get<double>();
  s.eps_hat_k = j.at("eps_hat_k").get<double>();
  s.lambda_k = opt_from_json(j.at("lambda_k"));
  s.labels_requested = j.at("labels_requested").get<long long>();
  s.budget_used = j.at("budget_used").get<long long>();
  return s;
}

json run_to_json(const RunRecord& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    steps.push_back(step_to_json(s));
  }
  return json{{"mode", r.mode},
              {"learner", r.learner},
              {"dataset", r.dataset},
              {"seed", r.seed},
              {"budget", r.budget},
              {"budget_used", r.budget_used},
              {"incomplete", r.incomplete},
              {"abort_reason", r.abort_reason},
              {"steps", steps},
              {"metrics", json{{"precision", r.metrics.precision},
                               {"excess_risk", opt_to_json(r.metrics.excess_risk)}}},
              {"num_stages", r.num_stages},
              {"lambdas", r.lambdas}};
}

RunRecord run_from_json(const json& j) {
  RunRecord r;
  r.mode = j.at("mode").get<std::string>();
  r.learner = j.at("learner").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.budget = j.at("budget").get<long long>();
  r.budget_used = j.at("budget_used").get<long long>();
  r.incomplete = j.at("incomplete").get<bool>();
  r.abort_reason = j.at("abort_reason").get<std::string>();
  for (const auto& s : j.at("steps")) {
    r.steps.push_back(step_from_json(s));
  }
  r.metrics.precision = j.at("metrics").at("precision").get<double>();
  r.metrics.excess_risk = opt_from_json(j.at("metrics").at("excess_risk"));
  r.num_stages = j.at("num_stages").get<std::size_t>();
  r.lambdas = j.at("lambdas").get<std::vector<double>>();
  return r;
}

json curve_to_json(const std::vector<CurvePoint>& points) {
  json arr = json::array();
  for (const auto& p : points) {
    arr.push_back(json{{"budget", p.budget},
                       {"mode", p.mode},
                       {"repeats", p.repeats},
                       {"precision_mean", p.precision_mean},
                       {"precision_std", p.precision_std},
                       {"excess_mean", opt_to_json(p.excess_mean)},
                       {"excess_std", opt_to_json(p.excess_std)},
                       {"aborts", p.aborts}});
  }
  return json{{"points", arr}};
}

std::vector<CurvePoint> curve_from_json(const json& j) {
  std::vector<CurvePoint> out;
  for (const auto& e : j.at("points")) {
    CurvePoint p;
    p.budget = e.at("budget").get<long long>();
    p.mode = e.at("mode").get<std::string>();
    p.repeats = e.at("repeats").get<int>();
    p.precision_mean = e.at("precision_mean").get<double>();
    p.precision_std = e.at("precision_std").get<double>();
    p.excess_mean = opt_from_json(e.at("excess_mean"));
    p.excess_std = opt_from_json(e.at("excess_std"));
    p.aborts = e.at("aborts").get<int>();
    out.push_back(std::move(p));
  }
  return out;
}

json rate_to_json(const RateFit& f) {
  json pts = json::array();
  for (const auto& p : f.points) {
    pts.push_back(json::array({p[0], p[1]}));
  }
  return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", pts}};
}

RateFit rate_from_json(const json& j) {
  RateFit f;
  f.slope = j.at("slope").get<double>();
  f.intercept = j.at("intercept").get<double>();
  f.r_squared = j.at("r_squared").get<double>();
  for (const auto& p : j.at("points")) {
    f.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return f;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  out << text;
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError("'" + path + "' is not valid JSON: " + e.what());
  }
  return j;
}

}  // namespace

void write_run_json(const RunRecord& rec, const std::string& path) {
  write_text(path, run_to_json(rec).dump(2) + "\n");
}

void write_run_csv(const RunRecord& rec, const std::string& path) {
  std::string text = "k,N_k,eps_k,eps_hat_k,lambda_k,labels_requested,budget_used\n";
  for (const auto& s : rec.steps) {
    text += std::to_string(s.k) + "," + std::to_string(s.n_k) + "," + fmt_double(s.eps_k) + "," +
            fmt_double(s.eps_hat_k) + "," +
            (s.lambda_k.has_value() ? fmt_double(*s.lambda_k) : std::string()) + "," +
            std::to_string(s.labels_requested) + "," + std::to_string(s.budget_used) + "\n";
  }
  text += "summary," + std::to_string(rec.budget) + ",,,," + std::to_string(rec.budget_used) + "," +
          std::to_string(rec.budget_used) + "\n";
  write_text(path, text);
}

void write_curve_csv(const std::vector<CurvePoint>& points, const std::string& path) {
  std::string text = "budget,mode,repeats,precision_mean,precision_std,excess_mean,excess_std,aborts\n";
  for (const auto& p : points) {
    text += std::to_string(p.budget) + "," + p.mode + "," + std::to_string(p.repeats) + "," +
            fmt_double(p.precision_mean) + "," + fmt_double(p.precision_std) + "," +
            (p.excess_mean.has_value() ? fmt_double(*p.excess_mean) : std::string()) + "," +
            (p.excess_std.has_value() ? fmt_double(*p.excess_std) : std::string()) + "," +
            std::to_string(p.aborts) + "\n";
  }
  write_text(path, text);
}

void write_curve_json(const std::vector<CurvePoint>& points, const std::string& path) {
  write_text(path, curve_to_json(points).dump(2) + "\n");
}

void write_rate_json(const RateFit& fit, const std::string& path) {
  write_text(path, rate_to_json(fit).dump(2) + "\n");
}

RunRecord read_run_json(const std::string& path) { return run_from_json(read_json_file(path)); }

std::vector<CurvePoint> read_curve_json(const std::string& path) {
  return curve_from_json(read_json_file(path));
}

RateFit read_rate_json(const std::string& path) { return rate_from_json(read_json_file(path)); }

}  // namespace ral
