#include "mosm/params.hpp"

#include <numbers>

#include "mosm/errors.hpp"

namespace mosm {

ParamLayout::ParamLayout(int channels, int input_dim, int mixture_size)
    : channels_(channels),
      input_dim_(input_dim),
      mixture_size_(mixture_size),
      block_(2 + 3 * input_dim) {}

int ParamLayout::index(Field field, int channel, int q, int dim) const {
  if (field == Field::LogNoise) return block_ * channels_ * mixture_size_ + channel;
  const int base = (channel * mixture_size_ + q) * block_;
  switch (field) {
    case Field::Weight: return base;
    case Field::Mean: return base + 1 + dim;
    case Field::LogScale: return base + 1 + input_dim_ + dim;
    case Field::Delay: return base + 1 + 2 * input_dim_ + dim;
    case Field::Phase: return base + 1 + 3 * input_dim_;
    case Field::LogNoise: break;
  }
  return -1;
}

double wrap_phase(double phase) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(phase, two_pi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

Vector pack(const MosmKernel& k) {
  const ParamLayout layout(k);
  Vector p(layout.size());
  for (int i = 0; i < k.channels(); ++i) {
    for (int q = 0; q < k.mixture_size(); ++q) {
      const SpectralComponent& c = k.component(i, q);
      p[layout.index(Field::Weight, i, q)] = c.weight;
      for (int d = 0; d < k.input_dim(); ++d) {
        p[layout.index(Field::Mean, i, q, d)] = c.mean[d];
        p[layout.index(Field::LogScale, i, q, d)] = std::log(c.scales[d]);
        p[layout.index(Field::Delay, i, q, d)] = c.delay[d];
      }
      p[layout.index(Field::Phase, i, q)] = c.phase;
    }
    p[layout.index(Field::LogNoise, i)] = std::log(std::max(k.noise_var(i), kMinNoiseVar));
  }
  return p;
}

MosmKernel unpack(const Vector& params, const MosmKernel& shape) {
  const ParamLayout layout(shape);
  if (params.size() != layout.size()) throw ParameterDomainError("parameter vector has the wrong length");
  if (!params.allFinite()) throw ParameterDomainError("parameter vector has non-finite entries");
  MosmKernel k(shape.channels(), shape.input_dim(), shape.mixture_size(), shape.mode());
  for (int i = 0; i < k.channels(); ++i) {
    for (int q = 0; q < k.mixture_size(); ++q) {
      SpectralComponent& c = k.component(i, q);
      c.weight = params[layout.index(Field::Weight, i, q)];
      for (int d = 0; d < k.input_dim(); ++d) {
        c.mean[d] = params[layout.index(Field::Mean, i, q, d)];
        c.scales[d] = std::exp(params[layout.index(Field::LogScale, i, q, d)]);
        c.delay[d] = params[layout.index(Field::Delay, i, q, d)];
      }
      c.phase = wrap_phase(params[layout.index(Field::Phase, i, q)]);
      if ((c.scales.array() <= 0.0).any() || !c.scales.allFinite()) {
        throw ParameterDomainError("log-scale out of representable range");
      }
    }
    k.set_noise_var(i, std::exp(params[layout.index(Field::LogNoise, i)]));
  }
  return k;
}

MosmKernel regauge(const MosmKernel& k) {
  MosmKernel out = k;
  for (int q = 0; q < k.mixture_size(); ++q) {
    const Vector delay0 = k.component(0, q).delay;
    const double phase0 = k.component(0, q).phase;
    for (int i = 0; i < k.channels(); ++i) {
      SpectralComponent& c = out.component(i, q);
      c.delay -= delay0;
      c.phase = wrap_phase(c.phase - phase0);
    }
  }
  return out;
}

FreeParameterization::FreeParameterization(const MosmKernel& reference)
    : shape_(reference), layout_(reference), base_(pack(reference)) {
  const int m = reference.channels();
  const int n = reference.input_dim();
  const ConstraintMode mode = reference.mode();
  const bool tied = mode == ConstraintMode::CSM || mode == ConstraintMode::SM_LMC;

  auto per_channel = [&](Field f, int q, int d, int first_channel) {
    for (int i = first_channel; i < m; ++i) targets_.push_back({layout_.index(f, i, q, d)});
  };
  auto shared = [&](Field f, int q, int d) {
    std::vector<int> t;
    for (int i = 0; i < m; ++i) t.push_back(layout_.index(f, i, q, d));
    targets_.push_back(std::move(t));
  };

  for (int q = 0; q < reference.mixture_size(); ++q) {
    per_channel(Field::Weight, q, 0, 0);
    for (int d = 0; d < n; ++d) {
      if (tied) {
        shared(Field::Mean, q, d);
        shared(Field::LogScale, q, d);
      } else {
        per_channel(Field::Mean, q, d, 0);
        per_channel(Field::LogScale, q, d, 0);
      }
    }
    if (mode == ConstraintMode::MOSM) {
      for (int d = 0; d < n; ++d) per_channel(Field::Delay, q, d, 1);
    }
    if (mode == ConstraintMode::MOSM || mode == ConstraintMode::CSM) {
      per_channel(Field::Phase, q, 0, 1);
    }
  }
  for (int i = 0; i < m; ++i) targets_.push_back({layout_.index(Field::LogNoise, i)});
}

Vector FreeParameterization::from_kernel(const MosmKernel& k) const {
  const Vector full = pack(k);
  Vector free(size());
  for (int f = 0; f < size(); ++f) free[f] = full[targets_[static_cast<std::size_t>(f)].front()];
  return free;
}

Vector FreeParameterization::to_full(const Vector& free) const {
  if (free.size() != size()) throw ParameterDomainError("free parameter vector has the wrong length");
  Vector full = base_;
  for (int f = 0; f < size(); ++f) {
    for (int idx : targets_[static_cast<std::size_t>(f)]) full[idx] = free[f];
  }
  return full;
}

MosmKernel FreeParameterization::to_kernel(const Vector& free) const {
  return unpack(to_full(free), shape_);
}

Vector FreeParameterization::reduce_gradient(const Vector& full_grad) const {
  Vector g = Vector::Zero(size());
  for (int f = 0; f < size(); ++f) {
    for (int idx : targets_[static_cast<std::size_t>(f)]) g[f] += full_grad[idx];
  }
  return g;
}

}  // namespace mosm
