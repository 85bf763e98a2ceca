#include "mosm/synth.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <random>

#include "mosm/errors.hpp"

namespace mosm {

std::vector<SmComponent> SynthConfig::generator() const {
  std::vector<SmComponent> out;
  for (std::size_t q = 0; q < weights.size(); ++q) {
    out.push_back(SmComponent{weights[q], Vector::Constant(1, means[q]), Vector::Constant(1, scales[q])});
  }
  return out;
}

void SynthConfig::validate() const {
  if (weights.empty() || weights.size() != means.size() || weights.size() != scales.size()) {
    throw ConfigError("generator weights, means and scales must be non-empty and equally long");
  }
  for (double s : scales) {
    if (!(s > 0.0)) throw ConfigError("generator scales must be positive");
  }
  if (!(grid_step > 0.0)) throw ConfigError("grid_step must be positive");
  if (!(grid.hi > grid.lo)) throw ConfigError("grid interval is empty");
  if (n_reference < 1 || n_derivative < 1 || n_delayed < 1) throw ConfigError("sample counts must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be non-negative");
  if (!(truth_lag_step > 0.0) || !(truth_lag_max >= 0.0)) throw ConfigError("truth lag grid is invalid");
  for (const Interval* iv : {&train_reference, &train_derivative, &train_delayed, &test_reference,
                             &test_derivative, &test_delayed}) {
    if (iv->lo > iv->hi || iv->lo < grid.lo || iv->hi > grid.hi) {
      throw ConfigError("sampling intervals must lie within the grid");
    }
  }
}

namespace {

nlohmann::json interval_json(const Interval& iv) { return nlohmann::json::array({iv.lo, iv.hi}); }

Interval interval_from(const nlohmann::json& doc, const char* key, Interval fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& a = doc.at(key);
  if (!a.is_array() || a.size() != 2) throw ConfigError(std::string("'") + key + "' must be [lo, hi]");
  return Interval{a[0].get<double>(), a[1].get<double>()};
}

}  // namespace

nlohmann::json SynthConfig::to_json() const {
  return {{"weights", weights},
          {"means", means},
          {"scales", scales},
          {"delay", delay},
          {"noise_std", noise_std},
          {"grid_step", grid_step},
          {"grid", interval_json(grid)},
          {"n_reference", n_reference},
          {"n_derivative", n_derivative},
          {"n_delayed", n_delayed},
          {"train_reference", interval_json(train_reference)},
          {"train_derivative", interval_json(train_derivative)},
          {"train_delayed", interval_json(train_delayed)},
          {"test_reference", interval_json(test_reference)},
          {"test_derivative", interval_json(test_derivative)},
          {"test_delayed", interval_json(test_delayed)},
          {"truth_lag_max", truth_lag_max},
          {"truth_lag_step", truth_lag_step},
          {"seed", seed}};
}

SynthConfig SynthConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("synthetic config must be a JSON object");
  try {
    SynthConfig c;
    c.weights = doc.value("weights", c.weights);
    c.means = doc.value("means", c.means);
    c.scales = doc.value("scales", c.scales);
    c.delay = doc.value("delay", c.delay);
    c.noise_std = doc.value("noise_std", c.noise_std);
    c.grid_step = doc.value("grid_step", c.grid_step);
    c.grid = interval_from(doc, "grid", c.grid);
    c.n_reference = doc.value("n_reference", c.n_reference);
    c.n_derivative = doc.value("n_derivative", c.n_derivative);
    c.n_delayed = doc.value("n_delayed", c.n_delayed);
    c.train_reference = interval_from(doc, "train_reference", c.train_reference);
    c.train_derivative = interval_from(doc, "train_derivative", c.train_derivative);
    c.train_delayed = interval_from(doc, "train_delayed", c.train_delayed);
    c.test_reference = interval_from(doc, "test_reference", c.test_reference);
    c.test_derivative = interval_from(doc, "test_derivative", c.test_derivative);
    c.test_delayed = interval_from(doc, "test_delayed", c.test_delayed);
    c.truth_lag_max = doc.value("truth_lag_max", c.truth_lag_max);
    c.truth_lag_step = doc.value("truth_lag_step", c.truth_lag_step);
    c.seed = doc.value("seed", c.seed);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed synthetic config: ") + e.what());
  }
}

Vector sample_gp_path(std::span<const SmComponent> kernel, const Vector& grid, std::uint64_t seed) {
  const auto size = grid.size();
  for (Eigen::Index t = 1; t < size; ++t) {
    if (!(grid[t] > grid[t - 1])) throw DataError("sampling grid must be strictly increasing");
  }
  Matrix k(size, size);
  Vector tau(1);
  for (Eigen::Index s = 0; s < size; ++s) {
    for (Eigen::Index r = s; r < size; ++r) {
      tau[0] = grid[r] - grid[s];
      k(r, s) = k(s, r) = sm_kernel(kernel, tau);
    }
  }
  if (k.diagonal().isZero(0.0)) return Vector::Zero(size);
  const JitteredCholesky chol = cholesky_jitter(k);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(size);
  for (Eigen::Index t = 0; t < size; ++t) z[t] = normal(gen);
  return chol.lower.triangularView<Eigen::Lower>() * z;
}

Vector derivative_channel(const Vector& grid, const Vector& values) {
  if (grid.size() < 2 || grid.size() != values.size()) {
    throw DataError("derivative needs at least two aligned grid points");
  }
  const auto size = grid.size();
  Vector out(size);
  for (Eigen::Index t = 0; t + 1 < size; ++t) {
    out[t] = (values[t + 1] - values[t]) / (grid[t + 1] - grid[t]);
  }
  out[size - 1] = out[size - 2];
  return out;
}

Vector delay_channel(const Vector& grid, const Vector& values, double delta) {
  if (grid.size() != values.size()) throw DataError("grid and values differ in length");
  if (delta == 0.0 || grid.size() < 2) return values;
  const double step = grid[1] - grid[0];
  const double ratio = delta / step;
  const double shift_f = std::round(ratio);
  if (std::abs(ratio - shift_f) > 1e-6 * std::max(1.0, std::abs(ratio))) {
    throw DataError("delay must be a multiple of the grid step; refine the grid");
  }
  const auto shift = static_cast<Eigen::Index>(shift_f);
  const auto size = grid.size();
  Vector out = Vector::Constant(size, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index t = 0; t < size; ++t) {
    const Eigen::Index src = t - shift;
    if (src >= 0 && src < size) out[t] = values[src];
  }
  return out;
}

SmDerivatives sm_kernel_derivatives(std::span<const SmComponent> kernel, double tau) {
  SmDerivatives out;
  for (const auto& c : kernel) {
    const double s = c.scales[0];
    const double mu = c.mean[0];
    const double e = c.weight * guarded_exp(-0.5 * s * tau * tau);
    const double cs = std::cos(mu * tau);
    const double sn = std::sin(mu * tau);
    out.k += e * cs;
    out.dk += e * (-s * tau * cs - mu * sn);
    out.d2k += e * ((s * s * tau * tau - s - mu * mu) * cs + 2.0 * s * tau * mu * sn);
  }
  return out;
}

namespace {

// Uniform draw without replacement among grid indices inside `iv` with a finite value.
std::vector<Eigen::Index> draw_locations(const Vector& grid, const Vector& values, const Interval& iv,
                                         int count, std::mt19937_64& gen) {
  std::vector<Eigen::Index> pool;
  for (Eigen::Index t = 0; t < grid.size(); ++t) {
    if (iv.contains(grid[t]) && std::isfinite(values[t])) pool.push_back(t);
  }
  if (static_cast<int>(pool.size()) < count) {
    throw ConfigError("sampling interval has fewer grid points than requested samples");
  }
  for (int t = 0; t < count; ++t) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(t), pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(t)], pool[pick(gen)]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

void append_rows(Dataset& d, const Vector& grid, const Vector& values, const std::vector<Eigen::Index>& idx,
                 int channel, double noise_std, std::mt19937_64* gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto start = d.size();
  d.locations.conservativeResize(start + static_cast<Eigen::Index>(idx.size()), 1);
  d.values.conservativeResize(start + static_cast<Eigen::Index>(idx.size()));
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const auto row = start + static_cast<Eigen::Index>(t);
    d.locations(row, 0) = grid[idx[t]];
    d.values[row] = values[idx[t]] + (gen != nullptr && noise_std > 0.0 ? noise_std * normal(*gen) : 0.0);
    d.channels.push_back(channel);
  }
}

std::vector<Eigen::Index> grid_points_in(const Vector& grid, const Vector& values, const Interval& iv) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index t = 0; t < grid.size(); ++t) {
    if (iv.contains(grid[t]) && std::isfinite(values[t])) out.push_back(t);
  }
  return out;
}

}  // namespace

SynthData make_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const auto sm = cfg.generator();
  const auto count = static_cast<Eigen::Index>(std::llround((cfg.grid.hi - cfg.grid.lo) / cfg.grid_step)) + 1;

  SynthData out;
  out.grid.resize(count);
  for (Eigen::Index t = 0; t < count; ++t) out.grid[t] = cfg.grid.lo + static_cast<double>(t) * cfg.grid_step;
  out.reference = sample_gp_path(sm, out.grid, cfg.seed);
  out.derivative = derivative_channel(out.grid, out.reference);
  out.delayed = delay_channel(out.grid, out.reference, cfg.delay);

  std::mt19937_64 gen(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const Vector* signals[3] = {&out.reference, &out.derivative, &out.delayed};
  const Interval train_iv[3] = {cfg.train_reference, cfg.train_derivative, cfg.train_delayed};
  const Interval test_iv[3] = {cfg.test_reference, cfg.test_derivative, cfg.test_delayed};
  const int counts[3] = {cfg.n_reference, cfg.n_derivative, cfg.n_delayed};

  out.train.locations.resize(0, 1);
  out.test.locations.resize(0, 1);
  for (int c = 0; c < 3; ++c) {
    const auto idx = draw_locations(out.grid, *signals[c], train_iv[c], counts[c], gen);
    append_rows(out.train, out.grid, *signals[c], idx, c, cfg.noise_std, &gen);
  }
  for (int c = 0; c < 3; ++c) {
    append_rows(out.test, out.grid, *signals[c], grid_points_in(out.grid, *signals[c], test_iv[c]), c, 0.0,
                nullptr);
  }

  const auto lags = static_cast<int>(std::floor(cfg.truth_lag_max / cfg.truth_lag_step + 1e-9));
  const std::pair<int, int> pairs[] = {{1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};
  for (const auto& [ci, cj] : pairs) {
    for (int t = -lags; t <= lags; ++t) {
      const double tau = t * cfg.truth_lag_step;
      double v = 0.0;
      if (ci == 1 && cj == 1) v = sm_kernel_derivatives(sm, tau).k;
      if (ci == 3 && cj == 3) v = sm_kernel_derivatives(sm, tau).k;
      if (ci == 1 && cj == 2) v = -sm_kernel_derivatives(sm, tau).dk;
      if (ci == 1 && cj == 3) v = sm_kernel_derivatives(sm, tau + cfg.delay).k;
      if (ci == 2 && cj == 2) v = -sm_kernel_derivatives(sm, tau).d2k;
      if (ci == 2 && cj == 3) v = sm_kernel_derivatives(sm, tau + cfg.delay).dk;
      out.truth.push_back({ci, cj, tau, v});
    }
  }
  return out;
}

double mae(const Vector& truth, const Vector& estimate) {
  if (truth.size() != estimate.size()) throw DataError("MAE inputs differ in length");
  if (truth.size() == 0) throw DataError("MAE of empty vectors");
  return (truth - estimate).cwiseAbs().mean();
}

void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& rows) {
  const auto old = out.precision(17);
  out << "tau,k_true,channel_i,channel_j\n";
  for (const auto& r : rows) out << r.tau << ',' << r.value << ',' << r.channel_i << ',' << r.channel_j << '\n';
  out.precision(old);
}

}  // namespace mosm
