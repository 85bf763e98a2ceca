#include "mosm/kernel.hpp"

#include <numbers>
#include <sstream>

#include "mosm/errors.hpp"

namespace mosm {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

SpectralComponent SpectralComponent::unit(int input_dim) {
  SpectralComponent c;
  c.weight = 1.0;
  c.mean = Vector::Zero(input_dim);
  c.scales = Vector::Ones(input_dim);
  c.delay = Vector::Zero(input_dim);
  c.phase = 0.0;
  return c;
}

void SpectralComponent::validate() const {
  const auto n = mean.size();
  if (scales.size() != n || delay.size() != n) {
    throw ParameterDomainError("spectral component fields have inconsistent dimensions");
  }
  if (!std::isfinite(weight) || !std::isfinite(phase) || !all_finite(mean) ||
      !all_finite(scales) || !all_finite(delay)) {
    throw ParameterDomainError("spectral component has non-finite entries");
  }
  if ((scales.array() <= 0.0).any()) {
    throw ParameterDomainError("spectral component scales must be strictly positive");
  }
}

std::string to_string(ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::MOSM: return "mosm";
    case ConstraintMode::CSM: return "csm";
    case ConstraintMode::SM_LMC: return "sm-lmc";
    case ConstraintMode::IGP: return "igp";
  }
  return "mosm";
}

ConstraintMode parse_constraint_mode(std::string_view text) {
  if (text == "mosm" || text == "MOSM") return ConstraintMode::MOSM;
  if (text == "csm" || text == "CSM") return ConstraintMode::CSM;
  if (text == "sm-lmc" || text == "sm_lmc" || text == "SM_LMC" || text == "SM-LMC") {
    return ConstraintMode::SM_LMC;
  }
  if (text == "igp" || text == "IGP") return ConstraintMode::IGP;
  throw ConfigError("unknown constraint mode '" + std::string(text) + "'");
}

MosmKernel::MosmKernel(int channels, int input_dim, int mixture_size, ConstraintMode mode)
    : channels_(channels), input_dim_(input_dim), mixture_size_(mixture_size), mode_(mode) {
  if (channels < 1 || input_dim < 1 || mixture_size < 1) {
    throw ParameterDomainError("kernel dimensions must be positive");
  }
  components_.assign(static_cast<std::size_t>(channels) * mixture_size,
                     SpectralComponent::unit(input_dim));
  noise_var_ = Vector::Zero(channels);
}

SpectralComponent& MosmKernel::component(int channel, int q) {
  check_channel(channel);
  if (q < 0 || q >= mixture_size_) throw std::out_of_range("mixture component index out of range");
  return components_[static_cast<std::size_t>(channel) * mixture_size_ + q];
}

const SpectralComponent& MosmKernel::component(int channel, int q) const {
  check_channel(channel);
  if (q < 0 || q >= mixture_size_) throw std::out_of_range("mixture component index out of range");
  return components_[static_cast<std::size_t>(channel) * mixture_size_ + q];
}

double MosmKernel::noise_var(int channel) const {
  check_channel(channel);
  return noise_var_[channel];
}

void MosmKernel::set_noise_var(int channel, double value) {
  check_channel(channel);
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ParameterDomainError("noise variance must be finite and non-negative");
  }
  noise_var_[channel] = value;
}

void MosmKernel::check_channel(int channel) const {
  if (channel < 0 || channel >= channels_) {
    std::ostringstream msg;
    msg << "channel id " << channel << " outside [0, " << channels_ << ")";
    throw ChannelRangeError(msg.str());
  }
}

void MosmKernel::validate() const {
  for (const auto& c : components_) {
    c.validate();
    if (c.dim() != input_dim_) throw ParameterDomainError("component dimension mismatch");
  }
  if (noise_var_.size() != channels_ || (noise_var_.array() < 0.0).any() || !noise_var_.allFinite()) {
    throw ParameterDomainError("noise variances must be finite and non-negative");
  }
}

CrossParams cross_params(const SpectralComponent& a, const SpectralComponent& b) {
  if (a.dim() != b.dim()) throw ParameterDomainError("components differ in input dimension");
  if ((a.scales.array() <= 0.0).any() || (b.scales.array() <= 0.0).any()) {
    throw ParameterDomainError("spectral scales must be strictly positive");
  }
  const int n = a.dim();
  const Eigen::ArrayXd sa = a.scales.array();
  const Eigen::ArrayXd sb = b.scales.array();
  const Eigen::ArrayXd sum = sa + sb;
  const Eigen::ArrayXd diff = a.mean.array() - b.mean.array();

  CrossParams p;
  p.cov_diag = (2.0 * sa * sb / sum).matrix();
  p.mean = ((sa * b.mean.array() + sb * a.mean.array()) / sum).matrix();
  p.weight = a.weight * b.weight * guarded_exp(-0.25 * (diff.square() / sum).sum());
  p.delay = a.delay - b.delay;
  p.phase = a.phase - b.phase;
  const double log_norm = 0.5 * n * std::log(2.0 * std::numbers::pi) +
                          0.5 * p.cov_diag.array().log().sum();
  p.magnitude = p.weight * std::exp(log_norm);
  return p;
}

namespace {

double cross_term(const CrossParams& p, const double* tau, int n) {
  double quad = 0.0;
  double arg = p.phase;
  for (int d = 0; d < n; ++d) {
    const double u = tau[d] + p.delay[d];
    quad += p.cov_diag[d] * u * u;
    arg += u * p.mean[d];
  }
  return p.magnitude * guarded_exp(-0.5 * quad) * std::cos(arg);
}

}  // namespace

double mosm_kernel(const MosmKernel& k, int i, int j, const Eigen::Ref<const Vector>& tau) {
  k.check_channel(i);
  k.check_channel(j);
  if (tau.size() != k.input_dim()) throw ParameterDomainError("lag dimension mismatch");
  if (k.mode() == ConstraintMode::IGP && i != j) return 0.0;
  const Vector t = tau;
  double sum = 0.0;
  for (int q = 0; q < k.mixture_size(); ++q) {
    sum += cross_term(cross_params(k.component(i, q), k.component(j, q)), t.data(), k.input_dim());
  }
  return sum;
}

std::complex<double> cross_density(const MosmKernel& k, int i, int j,
                                   const Eigen::Ref<const Vector>& omega) {
  k.check_channel(i);
  k.check_channel(j);
  if (omega.size() != k.input_dim()) throw ParameterDomainError("frequency dimension mismatch");
  if (k.mode() == ConstraintMode::IGP && i != j) return {0.0, 0.0};
  std::complex<double> sum{0.0, 0.0};
  for (int q = 0; q < k.mixture_size(); ++q) {
    const CrossParams p = cross_params(k.component(i, q), k.component(j, q));
    const Eigen::ArrayXd w = omega.array();
    const Eigen::ArrayXd s = p.cov_diag.array();
    const double lag_phase = (p.delay.array() * w).sum();
    const double e_plus = -0.5 * ((w - p.mean.array()).square() / s).sum();
    const double e_minus = -0.5 * ((w + p.mean.array()).square() / s).sum();
    // Direct term and its conjugate reflection.
    sum += 0.5 * p.weight *
           (guarded_exp(e_plus) * std::polar(1.0, lag_phase + p.phase) +
            guarded_exp(e_minus) * std::polar(1.0, lag_phase - p.phase));
  }
  return sum;
}

Eigen::MatrixXcd spectral_matrix(const MosmKernel& k, const Eigen::Ref<const Vector>& omega) {
  const int m = k.channels();
  Eigen::MatrixXcd s(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) s(i, j) = cross_density(k, i, j, omega);
  }
  return s;
}

double sm_kernel(std::span<const SmComponent> components, const Eigen::Ref<const Vector>& tau) {
  double sum = 0.0;
  for (const auto& c : components) {
    if (c.scales.size() != tau.size() || c.mean.size() != tau.size()) {
      throw ParameterDomainError("SM component dimension mismatch");
    }
    if ((c.scales.array() <= 0.0).any()) {
      throw ParameterDomainError("SM scales must be strictly positive");
    }
    const double quad = (c.scales.array() * tau.array().square()).sum();
    sum += c.weight * guarded_exp(-0.5 * quad) * std::cos(c.mean.dot(tau));
  }
  return sum;
}

SmComponent sm_equivalent(const SpectralComponent& c) {
  const CrossParams p = cross_params(c, c);
  return SmComponent{p.magnitude, c.mean, c.scales};
}

MosmKernel project_constraints(const MosmKernel& k, ConstraintMode mode) {
  MosmKernel out = k;
  out.set_mode(mode);
  if (mode == ConstraintMode::MOSM) return out;
  for (int q = 0; q < k.mixture_size(); ++q) {
    const SpectralComponent& ref = k.component(0, q);
    for (int i = 0; i < k.channels(); ++i) {
      SpectralComponent& c = out.component(i, q);
      switch (mode) {
        case ConstraintMode::CSM:
          c.mean = ref.mean;
          c.scales = ref.scales;
          c.delay = ref.delay;
          break;
        case ConstraintMode::SM_LMC:
          c.mean = ref.mean;
          c.scales = ref.scales;
          c.delay = ref.delay;
          c.phase = 0.0;
          break;
        case ConstraintMode::IGP:
          c.delay.setZero();
          c.phase = 0.0;
          break;
        case ConstraintMode::MOSM:
          break;
      }
    }
  }
  return out;
}

bool satisfies_constraints(const MosmKernel& k) {
  const ConstraintMode mode = k.mode();
  if (mode == ConstraintMode::MOSM) return true;
  for (int q = 0; q < k.mixture_size(); ++q) {
    const SpectralComponent& ref = k.component(0, q);
    for (int i = 0; i < k.channels(); ++i) {
      const SpectralComponent& c = k.component(i, q);
      if (mode == ConstraintMode::IGP) {
        if (!c.delay.isZero(0.0) || c.phase != 0.0) return false;
        continue;
      }
      if (c.mean != ref.mean || c.scales != ref.scales || c.delay != ref.delay) return false;
      if (mode == ConstraintMode::SM_LMC && c.phase != 0.0) return false;
    }
  }
  return true;
}

CrossParamTable::CrossParamTable(const MosmKernel& k)
    : channels_(k.channels()),
      mixture_size_(k.mixture_size()),
      input_dim_(k.input_dim()),
      independent_(k.mode() == ConstraintMode::IGP) {
  table_.reserve(static_cast<std::size_t>(channels_) * channels_ * mixture_size_);
  for (int i = 0; i < channels_; ++i) {
    for (int j = 0; j < channels_; ++j) {
      for (int q = 0; q < mixture_size_; ++q) {
        table_.push_back(cross_params(k.component(i, q), k.component(j, q)));
      }
    }
  }
}

double CrossParamTable::value(int i, int j, const double* tau) const {
  if (!coupled(i, j)) return 0.0;
  double sum = 0.0;
  for (int q = 0; q < mixture_size_; ++q) sum += cross_term(at(i, j, q), tau, input_dim_);
  return sum;
}

}  // namespace mosm
