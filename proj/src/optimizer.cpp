#include "mosm/optimizer.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace mosm {

namespace {

Vector two_loop_direction(const Vector& grad, const std::deque<Vector>& s_hist,
                          const std::deque<Vector>& y_hist) {
  const std::size_t k = s_hist.size();
  std::vector<double> rho(k), a(k);
  Vector q = -grad;
  for (std::size_t idx = k; idx-- > 0;) {
    rho[idx] = 1.0 / y_hist[idx].dot(s_hist[idx]);
    a[idx] = rho[idx] * s_hist[idx].dot(q);
    q -= a[idx] * y_hist[idx];
  }
  if (k > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
  for (std::size_t idx = 0; idx < k; ++idx) {
    const double b = rho[idx] * y_hist[idx].dot(q);
    q += (a[idx] - b) * s_hist[idx];
  }
  return q;
}

}  // namespace

OptimizerResult minimize_lbfgs(const Objective& f, Vector x0, const OptimizerOptions& opts,
                               const IterateCallback& on_iterate) {
  constexpr double armijo = 1e-4;
  constexpr int max_backtracks = 40;

  OptimizerResult res;
  res.x = std::move(x0);
  Vector grad(res.x.size());
  res.value = f(res.x, grad);
  if (!std::isfinite(res.value)) return res;

  std::deque<Vector> s_hist, y_hist;
  Vector x_new(res.x.size()), g_new(res.x.size());

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < opts.g_tol) {
      res.converged = true;
      break;
    }
    Vector dir = two_loop_direction(grad, s_hist, y_hist);
    double slope = dir.dot(grad);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      dir = -grad;
      slope = dir.dot(grad);
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / grad.lpNorm<Eigen::Infinity>()) : 1.0;

    bool accepted = false;
    double f_new = std::numeric_limits<double>::infinity();
    for (int bt = 0; bt < max_backtracks; ++bt) {
      x_new = res.x + step * dir;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.value + armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (s_hist.empty()) break;  // stalled even along steepest descent
      s_hist.clear();
      y_hist.clear();
      continue;
    }

    Vector s = x_new - res.x;
    Vector y = g_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      if (static_cast<int>(s_hist.size()) > opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    const double rel_change = (res.value - f_new) / std::max(1.0, std::abs(res.value));
    res.x = x_new;
    res.value = f_new;
    grad = g_new;
    res.iterations = iter;
    if (on_iterate) on_iterate(iter, f_new);
    if (rel_change < opts.f_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

OptimizerResult minimize_adam(const Objective& f, Vector x0, const OptimizerOptions& opts,
                              const IterateCallback& on_iterate) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;

  OptimizerResult best;
  Vector x = std::move(x0);
  Vector grad(x.size());
  double value = f(x, grad);
  best.x = x;
  best.value = value;
  if (!std::isfinite(value)) return best;

  Vector m = Vector::Zero(x.size());
  Vector v = Vector::Zero(x.size());
  double lr = opts.learning_rate;
  double prev = value;
  int stalls = 0;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1, iter);
    const double c2 = 1.0 - std::pow(beta2, iter);
    x -= lr * ((m / c1).array() / ((v / c2).array().sqrt() + eps)).matrix();
    value = f(x, grad);
    if (!std::isfinite(value)) {
      x = best.x;
      lr *= 0.5;
      value = f(x, grad);
    }
    best.iterations = iter;
    if (value < best.value) {
      best.value = value;
      best.x = x;
    }
    if (on_iterate) on_iterate(iter, value);
    stalls = std::abs(prev - value) / std::max(1.0, std::abs(prev)) < opts.f_tol ? stalls + 1 : 0;
    prev = value;
    if (stalls >= 10) {
      best.converged = true;
      break;
    }
  }
  return best;
}

}  // namespace mosm
