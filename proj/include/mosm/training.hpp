#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mosm/gp.hpp"
#include "mosm/kernel.hpp"
#include "mosm/optimizer.hpp"
#include "mosm/params.hpp"

namespace mosm {

struct NllGradient {
  double value = 0.0;
  Vector grad;  // with respect to pack(kernel)
  double jitter = 0.0;
};

/// NLL and its analytic gradient with respect to the full transformed
/// parameter vector (see ParamLayout). Throws IllConditionedError.
NllGradient nll_grad(const Dataset& data, const MosmKernel& k);
NllGradient nll_grad(const Dataset& data, const MosmKernel& shape, const Vector& params);

enum class OptimizerKind { QuasiNewton, Adam };
enum class InitStrategy { Uniform, Periodogram };

std::string to_string(OptimizerKind kind);
std::string to_string(InitStrategy init);
OptimizerKind parse_optimizer(const std::string& text);
InitStrategy parse_init(const std::string& text);

struct TrainConfig {
  int max_iters = 500;
  double tolerance = 1e-7;  // relative NLL change between accepted iterates
  OptimizerKind optimizer = OptimizerKind::QuasiNewton;
  std::uint64_t seed = 0;
  int restarts = 3;
  InitStrategy init = InitStrategy::Periodogram;
  double learning_rate = 0.02;
  bool parallel_restarts = true;

  void validate() const;
};

struct TraceEntry {
  int iteration = 0;
  double nll = 0.0;
  double jitter = 0.0;
};
using Trace = std::vector<TraceEntry>;

struct FitResult {
  MosmKernel kernel;
  Trace trace;  // best restart; entry 0 is the starting point
  double initial_nll = 0.0;
  double final_nll = 0.0;
  int best_restart = 0;
  std::vector<double> restart_nll;  // final NLL per restart (inf when failed)
};

class FitFailedError : public std::runtime_error {
 public:
  FitFailedError(const std::string& what, Trace best_trace)
      : std::runtime_error(what), best_trace_(std::move(best_trace)) {}
  const Trace& best_trace() const { return best_trace_; }

 private:
  Trace best_trace_;
};

/// Maximum-likelihood fit. Restart 0 starts from k0 (projected onto its
/// constraint mode and re-gauged); restart r > 0 starts from a fresh
/// initialization with seed cfg.seed + r. The lowest final NLL wins.
FitResult fit(const Dataset& data, const MosmKernel& k0, const TrainConfig& cfg);

/// Seeded random initialization. Means uniform in [0, pi / median spacing]
/// per dimension, lengthscales log-uniform across the input range, weights
/// sqrt(std / Q), zero delays and phases, noise at 10% of channel variance.
/// `channels` = 0 infers the count from the data.
MosmKernel initialize(const Dataset& data, int mixture_size, std::uint64_t seed, int channels = 0,
                      ConstraintMode mode = ConstraintMode::MOSM);

/// As initialize(), but component means start at the strongest Lomb-Scargle
/// peaks of each channel (slightly perturbed per seed).
MosmKernel initialize_from_periodogram(const Dataset& data, int mixture_size, std::uint64_t seed,
                                       int channels = 0, ConstraintMode mode = ConstraintMode::MOSM);

MosmKernel initialize(const Dataset& data, int mixture_size, std::uint64_t seed, int channels,
                      ConstraintMode mode, InitStrategy strategy);

/// Lomb-Scargle power of one channel's values along input dimension `dim`.
Vector lomb_scargle(const Vector& x, const Vector& y, const Vector& omegas);

void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace mosm
