#pragma once

#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "reject_active/rejection.hpp"

namespace ral {

enum class SynthName { sine, dasgupta1, easyhard2, gauss3 };

const char* to_string(SynthName name);
SynthName synth_name_from_string(const std::string& s);

struct SyntheticSpec {
  SynthName name = SynthName::sine;
  std::size_t dim = 2;  // sine supports 1 or 2; the other generators are 2-d
  double sigma = 0.3;   // gauss3 mixture spread
  // sine wave in original coordinates: eta(t) = (1 + sin(omega*t + phi))/2
  // where t is the last coordinate; the defaults give the illustrative
  // two-dimensional regression function
  double omega = std::numbers::pi / 2.0;
  double phi = 0.0;
};

/// A label source. Feature draws come from the marginal; each revealed label
/// consumes one unit of budget upstream. Synthetic oracles expose the true
/// regression function, pools reveal stored labels at most once per point.
class Oracle {
 public:
  struct Draw {
    std::vector<double> x;         // normalized to [0,1]^d
    std::ptrdiff_t pool_index = -1;  // -1 for distribution-backed draws
  };

  virtual ~Oracle() = default;

  virtual std::size_t dim() const = 0;
  /// Throws RunAbort(pool_exhaustion) when no point is left to draw.
  virtual Draw draw_x(Rng& rng) = 0;
  /// Pool oracles consume the drawn point (without replacement).
  virtual int reveal_label(const Draw& draw, Rng& rng) = 0;
  virtual std::optional<double> eta_true(std::span<const double> x) const;
  /// Test protocol: synthetic oracles draw a fresh i.i.d. labeled set, pools
  /// extract a held-out split before any labeling.
  virtual Dataset make_test_set(double test_size, Rng& rng) = 0;
  /// Label capacity still available (LLONG_MAX when unbounded).
  virtual long long remaining() const = 0;
};

class SyntheticOracle final : public Oracle {
 public:
  explicit SyntheticOracle(const SyntheticSpec& spec);

  std::size_t dim() const override { return spec_.dim; }
  Draw draw_x(Rng& rng) override;
  int reveal_label(const Draw& draw, Rng& rng) override;
  std::optional<double> eta_true(std::span<const double> x) const override;
  Dataset make_test_set(double test_size, Rng& rng) override;
  long long remaining() const override;

  const SyntheticSpec& spec() const { return spec_; }

 private:
  double eta_original(std::span<const double> v) const;
  std::vector<double> draw_original(Rng& rng) const;

  SyntheticSpec spec_;
  double lo_ = -1.0;  // affine map [lo,hi]^d -> [0,1]^d
  double hi_ = 1.0;
};

/// Finite pool over normalized points. Labeled draws are without
/// replacement; a held-out test split never enters the pool.
class PoolOracle final : public Oracle {
 public:
  explicit PoolOracle(std::shared_ptr<const Dataset> data,
                      std::optional<SyntheticOracle> truth = std::nullopt);

  std::size_t dim() const override;
  Draw draw_x(Rng& rng) override;
  int reveal_label(const Draw& draw, Rng& rng) override;
  std::optional<double> eta_true(std::span<const double> x) const override;
  Dataset make_test_set(double test_size, Rng& rng) override;
  long long remaining() const override;

  long long labels_consumed() const { return labels_consumed_; }

 private:
  enum class Status : unsigned char { available, labeled, held_out };

  void remove_available(std::size_t idx);

  std::shared_ptr<const Dataset> data_;
  std::vector<Status> status_;
  std::vector<std::size_t> available_;      // indices still drawable
  std::vector<std::size_t> position_;       // point index -> slot in available_
  std::optional<SyntheticOracle> truth_;
  long long labels_consumed_ = 0;
};

struct CsvData {
  std::shared_ptr<const Dataset> data;  // features normalized when requested
  std::vector<std::string> columns;
  std::size_t label_column = 0;
  std::vector<std::pair<double, double>> feature_bounds;  // pre-normalization min/max
  bool normalized = true;
  bool had_header = false;
};

/// Comma-separated numeric features plus a {0,1} label column. The header
/// row is auto-detected; label_col selects by 0-based index or by name, an
/// empty string means the last column. Errors carry 1-based line numbers.
CsvData load_csv_data(const std::string& path, const std::string& label_col, bool normalize);

PoolOracle load_csv(const std::string& path, const std::string& label_col, bool normalize);

/// n labeled points drawn from the generator (normalized coordinates).
Dataset materialize(SyntheticOracle& oracle, long long n, Rng& rng);

void write_csv_dataset(const Dataset& data, const std::string& path);

/// Description from which per-run oracle instances are built.
struct DatasetSpec {
  bool is_csv = false;
  SyntheticSpec synth{};
  long long pool_size = 0;  // synthetic: 0 samples the distribution directly
  std::shared_ptr<const CsvData> csv;
  std::string label = "sine";
};

DatasetSpec make_synthetic_spec(SynthName name, std::size_t dim, double sigma, long long pool_size,
                                double omega = 0.0, double phi = 0.0);  // omega <= 0: default wave
DatasetSpec make_csv_spec(const std::string& path, const std::string& label_col, bool normalize);

std::unique_ptr<Oracle> make_oracle(const DatasetSpec& spec, Rng& rng);

struct DrawnPoint {
  std::vector<double> x;
  std::optional<int> label;
  std::ptrdiff_t pool_index = -1;
  std::vector<double> zetas;  // randomization draws at acceptance time
};

/// Starvation/exhaustion abort carrying the points obtained so far.
class SampleAbort : public RunAbort {
 public:
  SampleAbort(Reason reason, std::vector<DrawnPoint> partial, const std::string& what)
      : RunAbort(reason, static_cast<long long>(partial.size()), what),
        partial(std::move(partial)) {}

  std::vector<DrawnPoint> partial;
};

/// Rejection sampling from the oracle's marginal conditioned on the chain's
/// deepest region. Labels are requested only when labeled = true.
/// max_attempts = 0 uses the default 200 * m.
std::vector<DrawnPoint> sample_conditional(Oracle& oracle, const RegionChain& chain,
                                           std::size_t m, double u, Rng& rng, bool labeled,
                                           std::size_t max_attempts = 0);

}  // namespace ral
