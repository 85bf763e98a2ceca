#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "mosm/gp.hpp"
#include "mosm/kernel.hpp"

namespace mosm {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Three-channel benchmark: channel 1 is a path of a 1-D SM process,
/// channel 2 its forward-difference derivative, channel 3 the path delayed
/// by `delay`. The generator parameters below are this project's defaults.
struct SynthConfig {
  std::vector<double> weights{1.0};
  std::vector<double> means{3.0};
  std::vector<double> scales{0.05};
  double delay = 1.0;
  double noise_std = 0.05;
  double grid_step = 0.02;
  Interval grid{-22.0, 22.0};
  int n_reference = 500;
  int n_derivative = 400;
  int n_delayed = 400;
  Interval train_reference{-20.0, 20.0};
  Interval train_derivative{-20.0, 0.0};
  Interval train_delayed{-20.0, 0.0};
  Interval test_reference{-20.0, 20.0};
  Interval test_derivative{0.0, 20.0};
  Interval test_delayed{0.0, 20.0};
  double truth_lag_max = 10.0;
  double truth_lag_step = 0.05;
  std::uint64_t seed = 0;

  std::vector<SmComponent> generator() const;
  void validate() const;

  nlohmann::json to_json() const;
  // Missing fields keep their defaults.
  static SynthConfig from_json(const nlohmann::json& doc);
};

/// Analytic covariance between channel i at x + tau and channel j at x
/// (1-based channel ids, as written to truth.csv).
struct TruthRow {
  int channel_i = 1;
  int channel_j = 1;
  double tau = 0.0;
  double value = 0.0;
};

struct SynthData {
  Dataset train;
  Dataset test;  // noise-free ground truth on the held-out regions
  std::vector<TruthRow> truth;
  Vector grid;
  Vector reference;
  Vector derivative;
  Vector delayed;  // NaN where x - delay falls off the grid
};

/// One draw L z of a zero-mean GP with SM covariance on `grid`.
Vector sample_gp_path(std::span<const SmComponent> kernel, const Vector& grid, std::uint64_t seed);

/// Forward differences (v[k+1] - v[k]) / (x[k+1] - x[k]); the last value is repeated.
Vector derivative_channel(const Vector& grid, const Vector& values);

/// values[k - delta/step]; entries whose source index is off the grid are NaN.
/// `delta` must be an integer multiple of the (uniform) grid step.
Vector delay_channel(const Vector& grid, const Vector& values, double delta);

SynthData make_synthetic(const SynthConfig& cfg);

/// k, dk/dtau and d2k/dtau2 of a 1-D SM kernel.
struct SmDerivatives {
  double k = 0.0;
  double dk = 0.0;
  double d2k = 0.0;
};
SmDerivatives sm_kernel_derivatives(std::span<const SmComponent> kernel, double tau);

double mae(const Vector& truth, const Vector& estimate);

void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& rows);

}  // namespace mosm
