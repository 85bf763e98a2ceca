#include "mosm/experiment.hpp"

#include "mosm/errors.hpp"

namespace mosm {

std::vector<ModelScore> run_synthetic_trial(const SynthConfig& synth, int mixture_size,
                                            const TrainConfig& train,
                                            const std::vector<ConstraintMode>& modes) {
  const SynthData data = make_synthetic(synth);
  const auto [train_n, state] = normalize(data.train, std::nullopt, 3);
  const Dataset test_n = state.apply(data.test);

  std::vector<ModelScore> scores;
  for (ConstraintMode mode : modes) {
    const MosmKernel k0 = initialize(train_n, mixture_size, train.seed, 3, mode, train.init);
    const FitResult fitted = fit(train_n, k0, train);
    const GpModel model(fitted.kernel, train_n);
    const Vector mean = model.predict_mean(test_n);

    ModelScore s;
    s.mode = mode;
    s.initial_nll = fitted.initial_nll;
    s.final_nll = fitted.final_nll;
    s.restart_nll = fitted.restart_nll;
    s.kernel = fitted.kernel;
    for (int c = 0; c < 3; ++c) {
      std::vector<int> rows;
      for (int r = 0; r < test_n.size(); ++r) {
        if (test_n.channels[static_cast<std::size_t>(r)] == c) rows.push_back(r);
      }
      Vector truth(static_cast<Eigen::Index>(rows.size())), est(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t t = 0; t < rows.size(); ++t) {
        truth[static_cast<Eigen::Index>(t)] = test_n.values[rows[t]];
        est[static_cast<Eigen::Index>(t)] = mean[rows[t]];
      }
      s.mae.push_back(mae(truth, est));
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

FailureScore run_failure_experiment(const Dataset& data, int channel, double fraction, int train_count,
                                    int mixture_size, ConstraintMode mode, const TrainConfig& train) {
  const int m = data.channel_count();
  auto [train_raw, test_raw] = mask_failure(data, channel, fraction);
  if (train_count > 0 && train_count < train_raw.size()) {
    train_raw = uniform_subsample(train_raw, train_count, train.seed);
  }
  const auto [train_n, state] = normalize(train_raw, std::nullopt, m);
  const Dataset test_n = state.apply(test_raw);

  const MosmKernel k0 = initialize(train_n, mixture_size, train.seed, m, mode, train.init);
  const FitResult fitted = fit(train_n, k0, train);
  const GpModel model(fitted.kernel, train_n);
  const Vector mean = model.predict_mean(test_n);

  FailureScore score;
  score.mae = mae(test_n.values, mean);
  score.baseline_mae = mae(test_n.values, Vector::Zero(test_n.size()));
  score.train_rows = train_n.size();
  score.test_rows = test_n.size();
  return score;
}

}  // namespace mosm
