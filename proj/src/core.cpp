#include "reject_active/core.hpp"

#include <algorithm>
#include <cmath>

namespace ral {

void Dataset::append(LabeledPoint p) {
  if (d == 0) {
    d = p.x.size();
  }
  if (p.x.size() != d) {
    throw InputError("point dimension " + std::to_string(p.x.size()) +
                     " does not match dataset dimension " + std::to_string(d));
  }
  if (p.y != 0 && p.y != 1) {
    throw InputError("label must be 0 or 1, got " + std::to_string(p.y));
  }
  for (double v : p.x) {
    if (!std::isfinite(v)) {
      throw InputError("non-finite feature value");
    }
  }
  points.push_back(std::move(p));
}

void BudgetTracker::charge(long long n) {
  if (!can_charge(n)) {
    throw InputError("budget overrun: " + std::to_string(used) + " + " + std::to_string(n) +
                     " > " + std::to_string(total));
  }
  used += n;
}

const char* to_string(ScheduleMode mode) {
  return mode == ScheduleMode::practical ? "practical" : "theoretical";
}

ScheduleMode schedule_mode_from_string(const std::string& s) {
  if (s == "practical") return ScheduleMode::practical;
  if (s == "theoretical") return ScheduleMode::theoretical;
  throw ConfigError("unknown schedule mode '" + s + "' (expected practical or theoretical)");
}

namespace {

long long isqrt_floor(long long n) {
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(n)));
  while ((r + 1) * (r + 1) <= n) ++r;
  while (r * r > n) --r;
  return r;
}

}  // namespace

Schedule schedule_init(long long budget, ScheduleMode mode, double c_n, double c_eps,
                       double delta, std::size_t d, int n0_multiplier) {
  if (budget < 4) {
    throw ConfigError("budget N must be at least 4, got " + std::to_string(budget));
  }
  if (!(c_n > 1.0)) {
    throw ConfigError("c_N must exceed 1");
  }
  if (mode == ScheduleMode::practical && !(c_eps > 0.0 && c_eps < 1.0)) {
    throw ConfigError("c_eps must lie in (0,1) in practical mode");
  }
  if (mode == ScheduleMode::theoretical && !(delta > 0.0 && delta < 0.5)) {
    throw ConfigError("delta must lie in (0,1/2) in theoretical mode");
  }
  if (d < 1) {
    throw ConfigError("dimension must be at least 1");
  }
  if (n0_multiplier < 1) {
    throw ConfigError("N0 multiplier must be a positive integer");
  }
  Schedule s;
  s.mode = mode;
  s.n0 = std::min<long long>(budget, n0_multiplier * isqrt_floor(budget));
  s.n0_multiplier = n0_multiplier;
  s.c_n = c_n;
  s.c_eps = c_eps;
  s.delta = delta;
  s.d = d;
  s.budget = budget;
  return s;
}

ScheduleStep schedule_step(const Schedule& s, int k, long long n_prev) {
  ScheduleStep out;
  out.n_k = static_cast<long long>(std::floor(s.c_n * static_cast<double>(n_prev)));
  if (s.mode == ScheduleMode::practical) {
    out.eps_k = std::pow(s.c_eps, k);
  } else {
    const double n = static_cast<double>(s.budget);
    const double raw = std::log(n / s.delta) * std::log(n) *
                       std::pow(static_cast<double>(n_prev), -1.0 / (2.0 + static_cast<double>(s.d)));
    out.eps_k = std::min(1.0, raw);
  }
  return out;
}

}  // namespace ral
