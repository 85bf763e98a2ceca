#pragma once

#include <vector>

#include "mosm/kernel.hpp"

namespace mosm {

enum class Field { Weight, Mean, LogScale, Delay, Phase, LogNoise };

/// Flat layout of every hyperparameter in transformed (unconstrained) space.
/// Per channel i and component q, in order: weight, mean[n], log scales[n],
/// delay[n], phase; then one log noise variance per channel.
class ParamLayout {
 public:
  ParamLayout(int channels, int input_dim, int mixture_size);
  explicit ParamLayout(const MosmKernel& k)
      : ParamLayout(k.channels(), k.input_dim(), k.mixture_size()) {}

  int size() const { return block_ * channels_ * mixture_size_ + channels_; }
  int block() const { return block_; }

  int index(Field field, int channel, int q = 0, int dim = 0) const;

  int channels() const { return channels_; }
  int input_dim() const { return input_dim_; }
  int mixture_size() const { return mixture_size_; }

 private:
  int channels_;
  int input_dim_;
  int mixture_size_;
  int block_;
};

// Smallest noise variance representable after the log transform.
inline constexpr double kMinNoiseVar = 1e-12;

Vector pack(const MosmKernel& k);

/// Inverse of pack. Dimensions and constraint mode come from `shape`; phases
/// are canonicalized into (-pi, pi].
MosmKernel unpack(const Vector& params, const MosmKernel& shape);

double wrap_phase(double phase);

/// Shift every component's delay and phase by channel 0's values so channel 0
/// carries zero delay and phase. Kernel values are unchanged.
MosmKernel regauge(const MosmKernel& k);

/// The free degrees of freedom of a kernel under its constraint mode, with
/// channel 0's delay and phase pinned. Each free coordinate drives one or more
/// entries of the full packed vector; all other entries stay at the
/// reference kernel's values.
class FreeParameterization {
 public:
  explicit FreeParameterization(const MosmKernel& reference);

  int size() const { return static_cast<int>(targets_.size()); }
  const ParamLayout& layout() const { return layout_; }

  Vector from_kernel(const MosmKernel& k) const;
  Vector to_full(const Vector& free) const;
  MosmKernel to_kernel(const Vector& free) const;
  Vector reduce_gradient(const Vector& full_grad) const;

  const std::vector<int>& targets(int free_index) const { return targets_[static_cast<std::size_t>(free_index)]; }

 private:
  MosmKernel shape_;
  ParamLayout layout_;
  Vector base_;
  std::vector<std::vector<int>> targets_;
};

}  // namespace mosm
