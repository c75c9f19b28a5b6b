#include "reject_active/oracles.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace ral {

const char* to_string(SynthName name) {
  switch (name) {
    case SynthName::sine: return "sine";
    case SynthName::dasgupta1: return "dasgupta1";
    case SynthName::easyhard2: return "easyhard2";
    case SynthName::gauss3: return "gauss3";
  }
  return "?";
}

SynthName synth_name_from_string(const std::string& s) {
  if (s == "sine") return SynthName::sine;
  if (s == "dasgupta1") return SynthName::dasgupta1;
  if (s == "easyhard2") return SynthName::easyhard2;
  if (s == "gauss3") return SynthName::gauss3;
  throw ConfigError("unknown synthetic dataset '" + s + "'");
}

std::optional<double> Oracle::eta_true(std::span<const double>) const { return std::nullopt; }

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// dasgupta1 marginal on the first coordinate: 80% mass uniform over the two
// clean slabs [-1,-0.6] u [0.2,1] (width-proportional), 20% mass uniform on
// the misleading band [-0.1,0.1]
constexpr double kSlabLeftLo = -1.0, kSlabLeftHi = -0.6;
constexpr double kSlabRightLo = 0.2, kSlabRightHi = 1.0;
constexpr double kBandHalfWidth = 0.1;
constexpr double kBandMass = 0.2;

}  // namespace

SyntheticOracle::SyntheticOracle(const SyntheticSpec& spec) : spec_(spec) {
  switch (spec_.name) {
    case SynthName::sine:
      if (spec_.dim != 1 && spec_.dim != 2) {
        throw ConfigError("sine supports dimension 1 or 2");
      }
      if (!(spec_.omega > 0.0) || !std::isfinite(spec_.omega) || !std::isfinite(spec_.phi)) {
        throw ConfigError("sine wave needs omega > 0 and finite phase");
      }
      lo_ = -1.0;
      hi_ = 1.0;
      break;
    case SynthName::dasgupta1:
    case SynthName::easyhard2:
      if (spec_.dim != 2) {
        throw ConfigError(std::string(to_string(spec_.name)) + " is a 2-d dataset");
      }
      lo_ = -1.0;
      hi_ = 1.0;
      break;
    case SynthName::gauss3:
      if (spec_.dim != 2) {
        throw ConfigError("gauss3 is a 2-d dataset");
      }
      if (!(spec_.sigma > 0.0)) {
        throw ConfigError("gauss3 needs sigma > 0");
      }
      lo_ = -1.5;  // clip box before normalization
      hi_ = 1.5;
      break;
  }
}

double SyntheticOracle::eta_original(std::span<const double> v) const {
  switch (spec_.name) {
    case SynthName::sine: {
      const double t = spec_.dim == 1 ? v[0] : v[1];
      return 0.5 * (1.0 + std::sin(spec_.omega * t + spec_.phi));
    }
    case SynthName::dasgupta1: {
      if (std::abs(v[0]) <= kBandHalfWidth) {
        return 0.5;
      }
      return v[0] > -0.3 ? 1.0 : 0.0;
    }
    case SynthName::easyhard2: {
      if (v[0] < 0.0) {
        return v[1] > 0.0 ? 1.0 : 0.0;
      }
      const double boundary = 0.4 * std::sin(2.0 * std::numbers::pi * v[0]);
      return clamp01(0.5 + (v[1] - boundary));
    }
    case SynthName::gauss3: {
      const double s2 = 2.0 * spec_.sigma * spec_.sigma;
      const double d1 = (v[0] - 0.5) * (v[0] - 0.5) + v[1] * v[1];
      const double d0 = (v[0] + 0.5) * (v[0] + 0.5) + v[1] * v[1];
      const double p1 = std::exp(-d1 / s2);
      const double p0 = std::exp(-d0 / s2);
      if (p0 + p1 <= 0.0) {
        return d1 < d0 ? 1.0 : 0.0;  // both densities underflowed
      }
      return p1 / (p0 + p1);
    }
  }
  return 0.5;
}

std::vector<double> SyntheticOracle::draw_original(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(spec_.dim);
  switch (spec_.name) {
    case SynthName::sine:
    case SynthName::easyhard2:
      for (auto& c : v) {
        c = -1.0 + 2.0 * unit(rng);
      }
      break;
    case SynthName::dasgupta1: {
      const double pick = unit(rng);
      if (pick < kBandMass) {
        v[0] = -kBandHalfWidth + 2.0 * kBandHalfWidth * unit(rng);
      } else {
        const double wl = kSlabLeftHi - kSlabLeftLo;
        const double wr = kSlabRightHi - kSlabRightLo;
        if (unit(rng) < wl / (wl + wr)) {
          v[0] = kSlabLeftLo + wl * unit(rng);
        } else {
          v[0] = kSlabRightLo + wr * unit(rng);
        }
      }
      v[1] = -1.0 + 2.0 * unit(rng);
      break;
    }
    case SynthName::gauss3: {
      std::normal_distribution<double> noise(0.0, spec_.sigma);
      const double mean_x = unit(rng) < 0.5 ? -0.5 : 0.5;
      v[0] = std::clamp(mean_x + noise(rng), lo_, hi_);
      v[1] = std::clamp(noise(rng), lo_, hi_);
      break;
    }
  }
  return v;
}

Oracle::Draw SyntheticOracle::draw_x(Rng& rng) {
  const std::vector<double> v = draw_original(rng);
  Draw d;
  d.x.resize(spec_.dim);
  for (std::size_t i = 0; i < spec_.dim; ++i) {
    d.x[i] = (v[i] - lo_) / (hi_ - lo_);
  }
  return d;
}

int SyntheticOracle::reveal_label(const Draw& draw, Rng& rng) {
  const double eta = *eta_true(draw.x);
  std::bernoulli_distribution coin(eta);
  return coin(rng) ? 1 : 0;
}

std::optional<double> SyntheticOracle::eta_true(std::span<const double> x) const {
  if (x.size() != spec_.dim) {
    throw InputError("query dimension does not match the oracle");
  }
  std::vector<double> v(spec_.dim);
  for (std::size_t i = 0; i < spec_.dim; ++i) {
    v[i] = lo_ + x[i] * (hi_ - lo_);
  }
  return eta_original(v);
}

Dataset SyntheticOracle::make_test_set(double test_size, Rng& rng) {
  const long long n = test_size >= 1.0 ? static_cast<long long>(test_size) : 5000;
  return materialize(*this, n, rng);
}

long long SyntheticOracle::remaining() const { return LLONG_MAX; }

PoolOracle::PoolOracle(std::shared_ptr<const Dataset> data, std::optional<SyntheticOracle> truth)
    : data_(std::move(data)), truth_(std::move(truth)) {
  if (!data_ || data_->empty()) {
    throw InputError("pool oracle needs a non-empty dataset");
  }
  status_.assign(data_->size(), Status::available);
  available_.resize(data_->size());
  position_.resize(data_->size());
  for (std::size_t i = 0; i < available_.size(); ++i) {
    available_[i] = i;
    position_[i] = i;
  }
}

void PoolOracle::remove_available(std::size_t idx) {
  const std::size_t slot = position_[idx];
  const std::size_t last = available_.back();
  available_[slot] = last;
  position_[last] = slot;
  available_.pop_back();
  position_[idx] = SIZE_MAX;
}

std::size_t PoolOracle::dim() const { return data_->d; }

Oracle::Draw PoolOracle::draw_x(Rng& rng) {
  if (available_.empty()) {
    throw RunAbort(RunAbort::Reason::pool_exhaustion, 0, "pool has no unlabeled point left");
  }
  std::uniform_int_distribution<std::size_t> pick(0, available_.size() - 1);
  const std::size_t idx = available_[pick(rng)];
  Draw d;
  d.x = data_->points[idx].x;
  d.pool_index = static_cast<std::ptrdiff_t>(idx);
  return d;
}

int PoolOracle::reveal_label(const Draw& draw, Rng&) {
  if (draw.pool_index < 0 || static_cast<std::size_t>(draw.pool_index) >= status_.size()) {
    throw InputError("label request for a point outside the pool");
  }
  const auto idx = static_cast<std::size_t>(draw.pool_index);
  if (status_[idx] != Status::available) {
    throw InputError("label for pool point " + std::to_string(idx) + " already consumed");
  }
  status_[idx] = Status::labeled;
  remove_available(idx);
  ++labels_consumed_;
  return data_->points[idx].y;
}

std::optional<double> PoolOracle::eta_true(std::span<const double> x) const {
  return truth_ ? truth_->eta_true(x) : std::nullopt;
}

Dataset PoolOracle::make_test_set(double test_size, Rng& rng) {
  if (truth_) {
    return truth_->make_test_set(test_size, rng);
  }
  if (labels_consumed_ > 0) {
    throw InputError("test split must be fixed before any labeling");
  }
  const auto n = static_cast<long long>(data_->size());
  long long count = 0;
  if (test_size <= 0.0) {
    count = n / 5;  // 20% held out by default
  } else if (test_size < 1.0) {
    count = static_cast<long long>(std::floor(test_size * static_cast<double>(n)));
  } else {
    count = static_cast<long long>(test_size);
  }
  if (count < 1 || count >= n) {
    throw ConfigError("held-out test split of " + std::to_string(count) + " points from a pool of " +
                      std::to_string(n) + " is not usable");
  }
  std::vector<std::size_t> chosen;
  chosen.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, available_.size() - 1);
    const std::size_t idx = available_[pick(rng)];
    status_[idx] = Status::held_out;
    remove_available(idx);
    chosen.push_back(idx);
  }
  std::sort(chosen.begin(), chosen.end());
  Dataset test;
  test.d = data_->d;
  for (std::size_t idx : chosen) {
    test.points.push_back(data_->points[idx]);
  }
  return test;
}

long long PoolOracle::remaining() const { return static_cast<long long>(available_.size()); }

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string field = line.substr(start, comma == std::string::npos ? comma : comma - start);
    // trim surrounding blanks
    const auto a = field.find_first_not_of(" \t");
    const auto b = field.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? std::string() : field.substr(a, b - a + 1));
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) {
    return false;
  }
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

bool parse_index(const std::string& s, std::size_t& out) {
  if (s.empty()) {
    return false;
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

CsvData load_csv_data(const std::string& path, const std::string& label_col, bool normalize) {
  std::ifstream in(path);
  if (!in) {
    throw LoadError("cannot open '" + path + "'");
  }
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    rows.emplace_back(line_no, split_fields(line));
  }
  if (rows.empty()) {
    throw LoadError("'" + path + "' contains no data");
  }

  const std::size_t ncols = rows.front().second.size();
  if (ncols < 2) {
    throw LoadError("'" + path + "' needs at least one feature column and a label column");
  }

  bool had_header = false;
  std::vector<std::string> columns;
  {
    double tmp = 0.0;
    for (const auto& f : rows.front().second) {
      if (!parse_double(f, tmp)) {
        had_header = true;
        break;
      }
    }
  }
  if (had_header) {
    columns = rows.front().second;
    rows.erase(rows.begin());
    if (rows.empty()) {
      throw LoadError("'" + path + "' contains a header but no data rows");
    }
  } else {
    for (std::size_t i = 0; i < ncols; ++i) {
      columns.push_back("col" + std::to_string(i));
    }
  }

  std::size_t label_idx = ncols - 1;
  if (!label_col.empty()) {
    if (parse_index(label_col, label_idx)) {
      if (label_idx >= ncols) {
        throw LoadError("label column index " + label_col + " out of range (have " +
                        std::to_string(ncols) + " columns)");
      }
    } else {
      if (!had_header) {
        throw LoadError("label column '" + label_col + "' requested by name but the file has no header");
      }
      const auto it = std::find(columns.begin(), columns.end(), label_col);
      if (it == columns.end()) {
        throw LoadError("label column '" + label_col + "' not found in header");
      }
      label_idx = static_cast<std::size_t>(it - columns.begin());
    }
  }

  auto data = std::make_shared<Dataset>();
  data->d = ncols - 1;
  for (const auto& [row_line, fields] : rows) {
    if (fields.size() != ncols) {
      throw LoadError("row " + std::to_string(row_line) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(ncols));
    }
    LabeledPoint p;
    p.x.reserve(ncols - 1);
    for (std::size_t c = 0; c < ncols; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw LoadError("row " + std::to_string(row_line) + ": cannot parse '" + fields[c] + "'");
      }
      if (c == label_idx) {
        if (v != 0.0 && v != 1.0) {
          throw LoadError("row " + std::to_string(row_line) + ": label must be 0 or 1, got " +
                          fields[c]);
        }
        p.y = static_cast<int>(v);
      } else {
        p.x.push_back(v);
      }
    }
    data->points.push_back(std::move(p));
  }

  CsvData out;
  out.columns = std::move(columns);
  out.label_column = label_idx;
  out.normalized = normalize;
  out.had_header = had_header;
  out.feature_bounds.assign(data->d, {0.0, 0.0});
  for (std::size_t c = 0; c < data->d; ++c) {
    double lo = data->points.front().x[c];
    double hi = lo;
    for (const auto& p : data->points) {
      lo = std::min(lo, p.x[c]);
      hi = std::max(hi, p.x[c]);
    }
    out.feature_bounds[c] = {lo, hi};
    if (normalize) {
      const double span = hi - lo;
      for (auto& p : data->points) {
        p.x[c] = span > 0.0 ? (p.x[c] - lo) / span : 0.0;
      }
    }
  }
  out.data = std::move(data);
  return out;
}

PoolOracle load_csv(const std::string& path, const std::string& label_col, bool normalize) {
  return PoolOracle(load_csv_data(path, label_col, normalize).data);
}

Dataset materialize(SyntheticOracle& oracle, long long n, Rng& rng) {
  if (n < 1) {
    throw ConfigError("cannot materialize an empty dataset");
  }
  Dataset out;
  out.d = oracle.dim();
  out.points.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    auto draw = oracle.draw_x(rng);
    const int y = oracle.reveal_label(draw, rng);
    out.points.push_back(LabeledPoint{std::move(draw.x), y});
  }
  return out;
}

void write_csv_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  for (std::size_t c = 0; c < data.d; ++c) {
    out << "x" << c << ",";
  }
  out << "label\n";
  char buf[64];
  for (const auto& p : data.points) {
    for (double v : p.x) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ",";
    }
    out << p.y << "\n";
  }
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

DatasetSpec make_synthetic_spec(SynthName name, std::size_t dim, double sigma, long long pool_size,
                                double omega, double phi) {
  DatasetSpec spec;
  spec.is_csv = false;
  spec.synth = SyntheticSpec{name, dim, sigma};
  if (omega > 0.0) {
    spec.synth.omega = omega;
    spec.synth.phi = phi;
  }
  spec.pool_size = pool_size;
  spec.label = to_string(name);
  SyntheticOracle probe(spec.synth);  // validates dim/sigma now
  if (pool_size < 0) {
    throw ConfigError("pool size must be non-negative");
  }
  return spec;
}

DatasetSpec make_csv_spec(const std::string& path, const std::string& label_col, bool normalize) {
  DatasetSpec spec;
  spec.is_csv = true;
  spec.csv = std::make_shared<const CsvData>(load_csv_data(path, label_col, normalize));
  spec.label = "csv:" + path;
  return spec;
}

std::unique_ptr<Oracle> make_oracle(const DatasetSpec& spec, Rng& rng) {
  if (spec.is_csv) {
    return std::make_unique<PoolOracle>(spec.csv->data);
  }
  SyntheticOracle synth(spec.synth);
  if (spec.pool_size == 0) {
    return std::make_unique<SyntheticOracle>(synth);
  }
  auto data = std::make_shared<Dataset>(materialize(synth, spec.pool_size, rng));
  return std::make_unique<PoolOracle>(std::move(data), std::move(synth));
}

std::vector<DrawnPoint> sample_conditional(Oracle& oracle, const RegionChain& chain,
                                           std::size_t m, double u, Rng& rng, bool labeled,
                                           std::size_t max_attempts) {
  if (m < 1) {
    throw InputError("conditional sample size must be positive");
  }
  if (max_attempts == 0) {
    max_attempts = 200 * m;
  }
  std::vector<DrawnPoint> out;
  out.reserve(m);
  std::vector<double> zetas;
  std::size_t attempts = 0;
  while (out.size() < m) {
    if (attempts >= max_attempts) {
      throw SampleAbort(RunAbort::Reason::region_starvation, std::move(out),
                        "region starvation after " + std::to_string(attempts) + " attempts");
    }
    ++attempts;
    Oracle::Draw draw;
    try {
      draw = oracle.draw_x(rng);
    } catch (const RunAbort& e) {
      throw SampleAbort(e.reason, std::move(out), e.what());
    }
    if (!chain.contains_sampling(draw.x, u, rng, &zetas)) {
      continue;
    }
    DrawnPoint p;
    p.x = std::move(draw.x);
    p.pool_index = draw.pool_index;
    p.zetas = zetas;
    if (labeled) {
      Oracle::Draw accepted;
      accepted.x = p.x;
      accepted.pool_index = p.pool_index;
      p.label = oracle.reveal_label(accepted, rng);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ral
