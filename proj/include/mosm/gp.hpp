#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mosm/kernel.hpp"

namespace mosm {

/// Observations (x_c, i_c, y_c). Channel ids are 0-based in memory.
struct Dataset {
  Matrix locations;          // N x n
  std::vector<int> channels;  // N
  Vector values;             // N

  int size() const { return static_cast<int>(channels.size()); }
  int input_dim() const { return static_cast<int>(locations.cols()); }
  bool empty() const { return channels.empty(); }

  // Throws DataError on length mismatch, non-finite entries, or ids outside [0, channel_count).
  void validate(int channel_count) const;
  // Largest channel id + 1.
  int channel_count() const;

  // Rows in the given order (indices may repeat).
  Dataset select(const std::vector<int>& rows) const;
  // Rows belonging to one channel, in file order.
  Dataset channel_rows(int channel) const;
};

Dataset concat(const Dataset& a, const Dataset& b);

/// Gram matrix with k_{i_r i_s}(x_r - x_s) entries and the channel noise
/// variance added on the diagonal.
Matrix gram(const MosmKernel& k, const Dataset& data);

/// Cross-covariance block between two sets of inputs, no noise.
Matrix cross_gram(const MosmKernel& k, const Dataset& rows, const Dataset& cols);

struct JitteredCholesky {
  Matrix lower;
  double jitter = 0.0;  // absolute value added to the diagonal
};

/// Factorizes A + eps*I with eps escalating through
/// {0, 1e-10, 1e-8, 1e-6, 1e-4} * mean(diag A). Throws IllConditionedError
/// when even the largest level fails.
JitteredCholesky cholesky_jitter(const Matrix& a);

inline constexpr double kJitterLevels[] = {0.0, 1e-10, 1e-8, 1e-6, 1e-4};

/// Negative log marginal likelihood from a lower Cholesky factor of K.
double nll_from_factor(const Matrix& lower, const Vector& y);

struct Posterior {
  Vector mean;
  Matrix cov;
};

struct MarginalPosterior {
  Vector mean;
  Vector variance;
};

/// Exact GP over a fixed kernel and dataset. The Cholesky factor and K^-1 y
/// are filled on construction and replaced whenever the kernel changes.
class GpModel {
 public:
  GpModel(MosmKernel kernel, Dataset data);

  const MosmKernel& kernel() const { return kernel_; }
  const Dataset& data() const { return data_; }
  void set_kernel(MosmKernel kernel);

  const Matrix& chol() const { return chol_.lower; }
  const Vector& alpha() const { return alpha_; }
  double jitter() const { return chol_.jitter; }

  double nll() const;

  /// Latent-function posterior at the queries; `include_noise` adds the
  /// channel noise variance to the diagonal of the predictive covariance.
  Posterior posterior(const Dataset& queries, bool include_noise = false) const;

  /// Pointwise mean and variance only; avoids the M x M covariance.
  MarginalPosterior marginal(const Dataset& queries, bool include_noise = false) const;
  Vector predict_mean(const Dataset& queries) const;

 private:
  void refresh();

  MosmKernel kernel_;
  Dataset data_;
  JitteredCholesky chol_;
  Vector alpha_;
};

double nll(const GpModel& model);

}  // namespace mosm
