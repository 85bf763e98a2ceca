#pragma once

#include <functional>

#include "mosm/kernel.hpp"

namespace mosm {

/// Objective callback: returns f(x) and writes the gradient. Returning a
/// non-finite value marks x as infeasible; the line search backs off.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

/// Called once per accepted iterate with (iteration, value).
using IterateCallback = std::function<void(int, double)>;

struct OptimizerOptions {
  int max_iters = 500;
  double f_tol = 1e-7;   // relative change in f between accepted iterates
  double g_tol = 1e-6;   // infinity norm of the gradient
  int history = 10;      // L-BFGS memory
  double learning_rate = 0.02;  // Adam
};

struct OptimizerResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with a backtracking Armijo line search. Accepted
/// iterates never increase f.
OptimizerResult minimize_lbfgs(const Objective& f, Vector x0, const OptimizerOptions& opts,
                               const IterateCallback& on_iterate = {});

/// Adam. Returns the best iterate seen, which need not be the last.
OptimizerResult minimize_adam(const Objective& f, Vector x0, const OptimizerOptions& opts,
                              const IterateCallback& on_iterate = {});

}  // namespace mosm
