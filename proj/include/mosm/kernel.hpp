#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mosm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One channel's share of one mixture component. Describes the complex
/// Gaussian spectral factor
///
///   R(w) = weight * exp(-1/4 (w - mean)^T diag(scales)^-1 (w - mean))
///                 * exp(-i (delay^T w + phase))
///
/// `scales` holds the diagonal spectral variances and must be strictly positive.
struct SpectralComponent {
  double weight = 0.0;
  Vector mean;
  Vector scales;
  Vector delay;
  double phase = 0.0;

  static SpectralComponent unit(int input_dim);

  int dim() const { return static_cast<int>(mean.size()); }
  void validate() const;
};

/// Parameters of the (unsymmetrized) cross-spectral density between two
/// components, plus the time-domain magnitude `magnitude` that absorbs the
/// inverse-Fourier normalization.
struct CrossParams {
  double weight = 0.0;
  Vector mean;
  Vector cov_diag;
  Vector delay;
  double phase = 0.0;
  double magnitude = 0.0;
};

enum class ConstraintMode { MOSM, CSM, SM_LMC, IGP };

std::string to_string(ConstraintMode mode);
ConstraintMode parse_constraint_mode(std::string_view text);

/// The full hyperparameter set: a channels x mixture_size grid of spectral
/// components and one noise variance per channel.
class MosmKernel {
 public:
  MosmKernel(int channels, int input_dim, int mixture_size,
             ConstraintMode mode = ConstraintMode::MOSM);

  int channels() const { return channels_; }
  int input_dim() const { return input_dim_; }
  int mixture_size() const { return mixture_size_; }
  ConstraintMode mode() const { return mode_; }
  void set_mode(ConstraintMode mode) { mode_ = mode; }

  SpectralComponent& component(int channel, int q);
  const SpectralComponent& component(int channel, int q) const;

  double noise_var(int channel) const;
  void set_noise_var(int channel, double value);
  const Vector& noise_vars() const { return noise_var_; }

  void check_channel(int channel) const;
  void validate() const;

 private:
  int channels_;
  int input_dim_;
  int mixture_size_;
  ConstraintMode mode_;
  std::vector<SpectralComponent> components_;  // channel-major
  Vector noise_var_;
};

CrossParams cross_params(const SpectralComponent& a, const SpectralComponent& b);

/// k_ij(tau) for 0-based channel ids. Under IGP mode cross-covariances are zero.
double mosm_kernel(const MosmKernel& k, int i, int j, const Eigen::Ref<const Vector>& tau);

/// Symmetrized cross-spectral density S_ij(omega), summed over components.
/// The mirrored term is the conjugate reflection, so that S_ij(-w) = conj(S_ij(w))
/// and the inverse transform is exactly the real kernel k_ij.
std::complex<double> cross_density(const MosmKernel& k, int i, int j,
                                   const Eigen::Ref<const Vector>& omega);

Eigen::MatrixXcd spectral_matrix(const MosmKernel& k, const Eigen::Ref<const Vector>& omega);

struct SmComponent {
  double weight = 0.0;
  Vector mean;
  Vector scales;
};

/// Scalar spectral mixture kernel sum_q w_q exp(-1/2 tau^T S_q tau) cos(mu_q^T tau).
double sm_kernel(std::span<const SmComponent> components, const Eigen::Ref<const Vector>& tau);

/// SM term reproducing a single-channel MOSM component:
/// weight = w^2 (2 pi)^{n/2} prod(scales)^{1/2}, same mean and scales.
SmComponent sm_equivalent(const SpectralComponent& c);

/// Ties parameters for the restricted baselines. CSM: per component, mean,
/// scales and delay copied from channel 0. SM_LMC: CSM plus zero phases.
/// IGP: delays and phases zeroed (they never enter auto-covariances).
/// MOSM returns the kernel unchanged.
MosmKernel project_constraints(const MosmKernel& k, ConstraintMode mode);

/// Exact check of the tying equalities for k.mode().
bool satisfies_constraints(const MosmKernel& k);

/// Precomputed cross parameters for every (i, j, q), for bulk evaluation.
class CrossParamTable {
 public:
  explicit CrossParamTable(const MosmKernel& k);

  const CrossParams& at(int i, int j, int q) const {
    return table_[(static_cast<std::size_t>(i) * channels_ + j) * mixture_size_ + q];
  }
  bool coupled(int i, int j) const { return i == j || !independent_; }

  double value(int i, int j, const double* tau) const;

  int channels() const { return channels_; }
  int mixture_size() const { return mixture_size_; }
  int input_dim() const { return input_dim_; }

 private:
  int channels_;
  int mixture_size_;
  int input_dim_;
  bool independent_;
  std::vector<CrossParams> table_;
};

// Shared numeric guard: exponent arguments are clamped here before exp().
inline constexpr double kMinExponent = -700.0;
inline double guarded_exp(double x) { return std::exp(x < kMinExponent ? kMinExponent : x); }

}  // namespace mosm
