#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mosm/data.hpp"
#include "mosm/training.hpp"

namespace mosm::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kNumericalError = 4 };

struct SimulateOptions {
  fs::path config;  // empty: all defaults
  fs::path out_dir;
  std::optional<std::uint64_t> seed;
};

/// Writes train.csv, test.csv, truth.csv and config.resolved.json.
void cmd_simulate(const SimulateOptions& opts);

struct TrainOptions {
  fs::path train_csv;
  fs::path config;  // optional model config document
  fs::path model_out;
  std::optional<std::string> mode;
  std::optional<int> components;
  std::optional<int> iters;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::optional<std::string> optimizer;
  std::optional<std::string> init;
};

struct ModelConfig {
  ConstraintMode mode = ConstraintMode::MOSM;
  int components = 5;
  int channels = 0;  // 0: inferred from the training file
  TrainConfig train;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& doc);
};

struct TrainSummary {
  ModelConfig config;
  FitResult fit;
  NormalizationState normalization;
};

/// Normalizes, initializes and fits; writes the model document and
/// `<model_out>.trace.csv`.
TrainSummary cmd_train(const TrainOptions& opts);

/// A trained model as stored on disk.
struct StoredModel {
  MosmKernel kernel{1, 1, 1};
  NormalizationState normalization;
  Dataset train;  // raw (de-normalized) training observations
  ModelConfig config;
};

StoredModel load_model(const fs::path& path);

struct PredictOptions {
  fs::path model;
  fs::path query;
  fs::path out;
  bool include_noise = false;
};

/// Writes x1..xn,channel,mean,std in original units.
void cmd_predict(const PredictOptions& opts);

struct EvaluateOptions {
  fs::path predictions;
  fs::path truth;
  fs::path out;    // empty: stdout
  fs::path model;  // optional: also report MAE in normalized units
};

struct ChannelMae {
  int channel = 1;  // 1-based
  int count = 0;
  double mae = 0.0;
  std::optional<double> normalized_mae;
};

std::vector<ChannelMae> cmd_evaluate(const EvaluateOptions& opts);

struct SpectraOptions {
  fs::path model;
  int channel_i = 1;  // 1-based
  int channel_j = 1;
  double omega_min = -10.0;
  double omega_max = 10.0;
  int omega_count = 1001;
  double tau_min = -5.0;
  double tau_max = 5.0;
  int tau_count = 501;
  fs::path out_prefix;  // writes <prefix>_density.csv and <prefix>_kernel.csv
};

void cmd_spectra(const SpectraOptions& opts);

struct SplitOptions {
  fs::path input;
  int channel = 1;  // 1-based
  double fraction = 0.5;
  std::optional<int> subsample;
  std::uint64_t seed = 0;
  fs::path train_out;
  fs::path test_out;
};

/// Sensor-failure split followed by an optional uniform subsample of the
/// training side.
void cmd_split(const SplitOptions& opts);

}  // namespace mosm::cli
