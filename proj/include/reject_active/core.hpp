#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ral {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration constants (schedule, learner or CLI parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed runtime input (dimension mismatch, empty sample, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or invalid data file.
class LoadError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Conditional sampling could not produce the requested number of points.
/// `accepted` is how many points had been obtained when the abort fired.
class RunAbort : public Error {
 public:
  enum class Reason { region_starvation, pool_exhaustion };

  RunAbort(Reason reason, long long accepted, const std::string& what)
      : Error(what), reason(reason), accepted(accepted) {}

  Reason reason;
  long long accepted;
};

struct LabeledPoint {
  std::vector<double> x;  // features, expected in [0,1]^d after normalization
  int y = 0;              // binary label in {0,1}
};

struct Dataset {
  std::size_t d = 0;
  std::vector<LabeledPoint> points;

  // throws InputError on dimension mismatch or non-binary label
  void append(LabeledPoint p);
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Label budget N with the number of requests consumed so far.
/// `used` is monotone non-decreasing and never exceeds `total`.
struct BudgetTracker {
  long long total = 0;
  long long used = 0;

  bool can_charge(long long n) const { return n >= 0 && used + n <= total; }
  void charge(long long n);
  long long remaining() const { return total - used; }
};

enum class ScheduleMode { practical, theoretical };

const char* to_string(ScheduleMode mode);
ScheduleMode schedule_mode_from_string(const std::string& s);

/// The (N_k, eps_k) sequences driving the engine loop.
///
/// practical mode:    eps_k = c_eps^k
/// theoretical mode:  eps_k = min(1, ln(N/delta) * ln(N) * N_{k-1}^(-1/(2+d)))
/// and in both modes  N_k = floor(c_n * N_{k-1}), eps_0 = 1.
struct Schedule {
  ScheduleMode mode = ScheduleMode::practical;
  long long n0 = 0;
  int n0_multiplier = 1;
  double c_n = 1.2;
  double c_eps = 0.95;  // practical mode only
  double delta = 0.05;  // theoretical mode only
  std::size_t d = 1;
  long long budget = 0;  // N

  static constexpr double eps0 = 1.0;
};

/// Validates constants and resolves N0 = n0_multiplier * floor(sqrt(N)),
/// capped at N. Throws ConfigError on invalid constants or N < 4.
Schedule schedule_init(long long budget, ScheduleMode mode, double c_n, double c_eps,
                       double delta, std::size_t d, int n0_multiplier);

struct ScheduleStep {
  long long n_k = 0;
  double eps_k = 1.0;
};

/// Total on valid inputs (k >= 1, n_prev >= 1); deterministic.
ScheduleStep schedule_step(const Schedule& s, int k, long long n_prev);

}  // namespace ral
