#pragma once

#include <vector>

#include "mosm/data.hpp"
#include "mosm/synth.hpp"
#include "mosm/training.hpp"

namespace mosm {

struct ModelScore {
  ConstraintMode mode = ConstraintMode::MOSM;
  std::vector<double> mae;  // per channel, normalized units
  double initial_nll = 0.0;
  double final_nll = 0.0;
  std::vector<double> restart_nll;
  MosmKernel kernel{1, 1, 1};
};

/// Runs the three-channel reconstruction benchmark: generate, normalize with
/// training statistics, initialize and fit each requested model, and score
/// the posterior mean on the held-out regions.
std::vector<ModelScore> run_synthetic_trial(const SynthConfig& synth, int mixture_size,
                                            const TrainConfig& train,
                                            const std::vector<ConstraintMode>& modes);

struct FailureScore {
  double mae = 0.0;           // normalized units, masked region of the failed channel
  double baseline_mae = 0.0;  // predicting the training mean (0 after normalization)
  int train_rows = 0;
  int test_rows = 0;
};

/// Sensor-failure protocol: hide the last `fraction` of `channel`, keep an
/// optional uniform subsample of the rest for training, fit, and score the
/// imputation of the hidden part.
FailureScore run_failure_experiment(const Dataset& data, int channel, double fraction, int train_count,
                                    int mixture_size, ConstraintMode mode, const TrainConfig& train);

}  // namespace mosm
