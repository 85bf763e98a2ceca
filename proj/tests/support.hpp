#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mosm/gp.hpp"
#include "mosm/kernel.hpp"

namespace mosm::testing {

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

inline SpectralComponent random_component(std::mt19937_64& gen, int n) {
  SpectralComponent c = SpectralComponent::unit(n);
  c.weight = uniform(gen, -1.5, 1.5);
  for (int d = 0; d < n; ++d) {
    c.mean[d] = uniform(gen, 0.0, 4.0);
    c.scales[d] = std::exp(uniform(gen, std::log(0.2), std::log(3.0)));
    c.delay[d] = uniform(gen, -1.0, 1.0);
  }
  c.phase = uniform(gen, -std::numbers::pi, std::numbers::pi);
  return c;
}

inline MosmKernel random_kernel(std::mt19937_64& gen, int m, int n, int q,
                                ConstraintMode mode = ConstraintMode::MOSM) {
  MosmKernel k(m, n, q);
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < q; ++r) k.component(i, r) = random_component(gen, n);
    k.set_noise_var(i, std::exp(uniform(gen, std::log(0.01), std::log(0.3))));
  }
  return project_constraints(k, mode);
}

inline Dataset random_dataset(std::mt19937_64& gen, int m, int n, int size, double span = 4.0) {
  Dataset d;
  d.locations.resize(size, n);
  d.values.resize(size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < n; ++c) d.locations(r, c) = uniform(gen, -span, span);
    d.channels.push_back(r % m);
    d.values[r] = uniform(gen, -1.0, 1.0);
  }
  return d;
}

/// Trapezoidal inverse transform of cross_density along one input dimension:
/// k(tau) ~ int S(w) e^{i w tau} dw over [-limit, limit].
inline double quadrature_kernel(const MosmKernel& k, int i, int j, double tau, double limit, int points) {
  const double h = 2.0 * limit / (points - 1);
  std::complex<double> acc = 0.0;
  Vector w(1);
  for (int t = 0; t < points; ++t) {
    w[0] = -limit + h * t;
    const double edge = (t == 0 || t == points - 1) ? 0.5 : 1.0;
    acc += edge * cross_density(k, i, j, w) * std::exp(std::complex<double>(0.0, w[0] * tau));
  }
  return (acc * h).real();
}

/// Frequency half-width covering every component: max_q |mu_ij| + 8 sqrt(Sigma_ij).
inline double quadrature_limit(const MosmKernel& k, int i, int j) {
  double limit = 0.0;
  for (int q = 0; q < k.mixture_size(); ++q) {
    const CrossParams p = cross_params(k.component(i, q), k.component(j, q));
    limit = std::max(limit, std::abs(p.mean[0]) + 8.0 * std::sqrt(p.cov_diag[0]));
  }
  return limit;
}

/// NLL via explicit determinant and inverse.
inline double dense_nll(const Matrix& kmat, const Vector& y) {
  const double n = static_cast<double>(y.size());
  const Matrix inv = kmat.inverse();
  return 0.5 * std::log(kmat.determinant()) + 0.5 * y.dot(inv * y) + 0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace mosm::testing
