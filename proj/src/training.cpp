#include "mosm/training.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "mosm/errors.hpp"

namespace mosm {

// ---------------------------------------------------------------------------
// Gradient
//
// dNLL/dp = 1/2 sum_rs W_rs dK_rs/dp with W = K^-1 - a a^T, a = K^-1 y.
// Every Gram entry of channel pair (i, j) depends only on the components of
// channels i and j, so the per-entry work reduces to a handful of weighted
// sums per (i, j, q); the chain rule through the cross parameters is applied
// once per pair afterwards.
// ---------------------------------------------------------------------------

namespace {

struct PairSums {
  double wk = 0.0;      // sum W k
  double wec = 0.0;     // sum W E cos
  double wsin = 0.0;    // sum W (-alpha E sin)
  std::vector<double> wk_u;     // sum W k u_d
  std::vector<double> wsin_u;   // sum W (-alpha E sin) u_d
  std::vector<double> wk_u2;    // sum W k (-u_d^2 / 2)
};

}  // namespace

NllGradient nll_grad(const Dataset& data, const MosmKernel& k) {
  const int n = k.input_dim();
  const int m = k.channels();
  const int qn = k.mixture_size();
  const int size = data.size();
  if (size == 0) throw DataError("NLL needs a non-empty dataset");

  const Matrix kmat = gram(k, data);
  JitteredCholesky chol = cholesky_jitter(kmat);
  const auto lower = chol.lower.triangularView<Eigen::Lower>();

  NllGradient out;
  out.value = nll_from_factor(chol.lower, data.values);
  out.jitter = chol.jitter;

  Vector alpha = lower.solve(data.values);
  chol.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha);

  const Matrix linv = lower.solve(Matrix::Identity(size, size));
  Matrix w = Matrix::Zero(size, size);
  w.selfadjointView<Eigen::Lower>().rankUpdate(linv.transpose());
  w.selfadjointView<Eigen::Lower>().rankUpdate(alpha, -1.0);  // lower triangle only

  const CrossParamTable table(k);
  std::vector<PairSums> sums(static_cast<std::size_t>(m) * m * qn);
  for (auto& s : sums) {
    s.wk_u.assign(static_cast<std::size_t>(n), 0.0);
    s.wsin_u.assign(static_cast<std::size_t>(n), 0.0);
    s.wk_u2.assign(static_cast<std::size_t>(n), 0.0);
  }
  auto sums_at = [&](int i, int j, int q) -> PairSums& {
    return sums[(static_cast<std::size_t>(i) * m + j) * qn + q];
  };

  std::vector<double> u(static_cast<std::size_t>(n));
  for (int s = 0; s < size; ++s) {
    const int cj = data.channels[static_cast<std::size_t>(s)];
    for (int r = s; r < size; ++r) {
      const int ci = data.channels[static_cast<std::size_t>(r)];
      if (!table.coupled(ci, cj)) continue;
      const double wt = (r == s ? 1.0 : 2.0) * w(r, s);
      for (int q = 0; q < qn; ++q) {
        const CrossParams& p = table.at(ci, cj, q);
        double quad = 0.0;
        double arg = p.phase;
        for (int d = 0; d < n; ++d) {
          u[d] = data.locations(r, d) - data.locations(s, d) + p.delay[d];
          quad += p.cov_diag[d] * u[d] * u[d];
          arg += u[d] * p.mean[d];
        }
        const double e = guarded_exp(-0.5 * quad);
        const double c = std::cos(arg);
        const double sn = std::sin(arg);
        const double kval = p.magnitude * e * c;
        const double wsin = -wt * p.magnitude * e * sn;
        PairSums& acc = sums_at(ci, cj, q);
        acc.wk += wt * kval;
        acc.wec += wt * e * c;
        acc.wsin += wsin;
        for (int d = 0; d < n; ++d) {
          acc.wk_u[d] += wt * kval * u[d];
          acc.wsin_u[d] += wsin * u[d];
          acc.wk_u2[d] += -0.5 * wt * kval * u[d] * u[d];
        }
      }
    }
  }

  const ParamLayout layout(k);
  out.grad = Vector::Zero(layout.size());
  Vector& g = out.grad;
  const double log_two_pi = std::log(2.0 * std::numbers::pi);

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!table.coupled(i, j)) continue;
      for (int q = 0; q < qn; ++q) {
        const PairSums& acc = sums_at(i, j, q);
        const CrossParams& p = table.at(i, j, q);
        const SpectralComponent& a = k.component(i, q);
        const SpectralComponent& b = k.component(j, q);

        // G = alpha / (w_a w_b)
        double log_g = 0.5 * n * log_two_pi;
        double mismatch = 0.0;
        for (int d = 0; d < n; ++d) {
          const double diff = a.mean[d] - b.mean[d];
          mismatch += diff * diff / (a.scales[d] + b.scales[d]);
          log_g += 0.5 * std::log(p.cov_diag[d]);
        }
        const double gfac = guarded_exp(-0.25 * mismatch) * std::exp(log_g);

        g[layout.index(Field::Weight, i, q)] += 0.5 * b.weight * gfac * acc.wec;
        g[layout.index(Field::Weight, j, q)] += 0.5 * a.weight * gfac * acc.wec;
        g[layout.index(Field::Phase, i, q)] += 0.5 * acc.wsin;
        g[layout.index(Field::Phase, j, q)] -= 0.5 * acc.wsin;

        for (int d = 0; d < n; ++d) {
          const double sa = a.scales[d];
          const double sb = b.scales[d];
          const double sum = sa + sb;
          const double diff = a.mean[d] - b.mean[d];
          const double cov = p.cov_diag[d];

          const double d_delay = -cov * acc.wk_u[d] + p.mean[d] * acc.wsin;
          g[layout.index(Field::Delay, i, q, d)] += 0.5 * d_delay;
          g[layout.index(Field::Delay, j, q, d)] -= 0.5 * d_delay;

          g[layout.index(Field::Mean, i, q, d)] +=
              0.5 * (-0.5 * diff / sum * acc.wk + acc.wsin_u[d] * sb / sum);
          g[layout.index(Field::Mean, j, q, d)] +=
              0.5 * (0.5 * diff / sum * acc.wk + acc.wsin_u[d] * sa / sum);

          const double cross = sa * sb / (sum * sum);
          g[layout.index(Field::LogScale, i, q, d)] +=
              0.5 * (acc.wk * (0.25 * diff * diff * sa / (sum * sum) + 0.5 * sb / sum) +
                     acc.wk_u2[d] * cov * sb / sum - acc.wsin_u[d] * cross * diff);
          g[layout.index(Field::LogScale, j, q, d)] +=
              0.5 * (acc.wk * (0.25 * diff * diff * sb / (sum * sum) + 0.5 * sa / sum) +
                     acc.wk_u2[d] * cov * sa / sum + acc.wsin_u[d] * cross * diff);
        }
      }
    }
  }

  for (int r = 0; r < size; ++r) {
    const int c = data.channels[static_cast<std::size_t>(r)];
    g[layout.index(Field::LogNoise, c)] += 0.5 * w(r, r) * k.noise_var(c);
  }
  return out;
}

NllGradient nll_grad(const Dataset& data, const MosmKernel& shape, const Vector& params) {
  return nll_grad(data, unpack(params, shape));
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "lbfgs";
}

std::string to_string(InitStrategy init) {
  return init == InitStrategy::Uniform ? "uniform" : "periodogram";
}

OptimizerKind parse_optimizer(const std::string& text) {
  if (text == "lbfgs" || text == "quasi-newton") return OptimizerKind::QuasiNewton;
  if (text == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + text + "'");
}

InitStrategy parse_init(const std::string& text) {
  if (text == "uniform") return InitStrategy::Uniform;
  if (text == "periodogram") return InitStrategy::Periodogram;
  throw ConfigError("unknown initialization strategy '" + text + "'");
}

void TrainConfig::validate() const {
  if (max_iters < 0) throw ConfigError("max_iters must be non-negative");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (restarts < 1) throw ConfigError("restarts must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

namespace {

struct ChannelStats {
  double variance = 1.0;
  Vector spacing;  // median nearest-neighbour spacing per dimension
};

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

double median_nn_spacing(std::vector<double> coords) {
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  if (coords.size() < 2) return 1.0;
  std::vector<double> nn(coords.size());
  for (std::size_t t = 0; t < coords.size(); ++t) {
    double best = std::numeric_limits<double>::infinity();
    if (t > 0) best = coords[t] - coords[t - 1];
    if (t + 1 < coords.size()) best = std::min(best, coords[t + 1] - coords[t]);
    nn[t] = best;
  }
  return median(std::move(nn));
}

ChannelStats channel_stats(const Dataset& data, int channel) {
  ChannelStats st;
  const Dataset rows = data.channel_rows(channel);
  st.spacing = Vector::Ones(data.input_dim());
  if (rows.size() >= 2) {
    const double mean = rows.values.mean();
    const double var = (rows.values.array() - mean).square().mean();
    if (var > 0.0) st.variance = var;
    for (int d = 0; d < data.input_dim(); ++d) {
      std::vector<double> c(rows.locations.col(d).data(), rows.locations.col(d).data() + rows.size());
      st.spacing[d] = median_nn_spacing(std::move(c));
    }
  }
  return st;
}

Vector input_range(const Dataset& data) {
  Vector range(data.input_dim());
  for (int d = 0; d < data.input_dim(); ++d) {
    const double r = data.locations.col(d).maxCoeff() - data.locations.col(d).minCoeff();
    range[d] = r > 0.0 ? r : 1.0;
  }
  return range;
}

// Piecewise-linear interpolant of a 1-D channel, evaluated on a uniform grid.
Vector interpolate(const Dataset& rows, double start, double step, int count) {
  std::vector<std::pair<double, double>> pts;
  for (int r = 0; r < rows.size(); ++r) pts.emplace_back(rows.locations(r, 0), rows.values[r]);
  std::sort(pts.begin(), pts.end());
  Vector out(count);
  std::size_t t = 0;
  for (int g = 0; g < count; ++g) {
    const double x = start + g * step;
    while (t + 2 < pts.size() && pts[t + 1].first < x) ++t;
    const auto& [x0, y0] = pts[t];
    const auto& [x1, y1] = pts[t + 1];
    const double f = x1 > x0 ? std::clamp((x - x0) / (x1 - x0), 0.0, 1.0) : 0.0;
    out[g] = y0 + f * (y1 - y0);
  }
  return out;
}

// Lag L maximizing corr(y_i(x), y_0(x - L)) over the shared span, or 0 when
// the channels barely overlap.
double cross_correlation_lag(const Dataset& data, int channel) {
  const Dataset a = data.channel_rows(0);
  const Dataset b = data.channel_rows(channel);
  if (a.size() < 4 || b.size() < 4) return 0.0;
  const double lo = std::max(a.locations.minCoeff(), b.locations.minCoeff());
  const double hi = std::min(a.locations.maxCoeff(), b.locations.maxCoeff());
  if (!(hi > lo)) return 0.0;
  std::vector<double> xa(a.locations.data(), a.locations.data() + a.size());
  std::vector<double> xb(b.locations.data(), b.locations.data() + b.size());
  const double step = std::min(median_nn_spacing(xa), median_nn_spacing(xb));
  const int count = std::min(static_cast<int>((hi - lo) / step) + 1, 20000);
  if (count < 8) return 0.0;
  const double h = (hi - lo) / (count - 1);
  const Vector ya = interpolate(a, lo, h, count);
  const Vector yb = interpolate(b, lo, h, count);

  const int max_lag = count / 4;
  double best = -std::numeric_limits<double>::infinity();
  int best_lag = 0;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    const int first = std::max(0, lag);
    const int len = count - std::abs(lag);
    const Eigen::ArrayXd u = yb.segment(first, len).array();
    const Eigen::ArrayXd v = ya.segment(first - lag, len).array();
    const Eigen::ArrayXd uc = u - u.mean();
    const Eigen::ArrayXd vc = v - v.mean();
    const double den = std::sqrt(uc.square().sum() * vc.square().sum());
    if (den <= 0.0) continue;
    const double corr = (uc * vc).sum() / den;
    if (corr > best) {
      best = corr;
      best_lag = lag;
    }
  }
  return best_lag * h;
}

MosmKernel initialize_impl(const Dataset& data, int mixture_size, std::uint64_t seed, int channels,
                           ConstraintMode mode, InitStrategy strategy) {
  if (data.empty()) throw DataError("cannot initialize from an empty dataset");
  if (mixture_size < 1) throw ConfigError("mixture size must be positive");
  const int m = channels > 0 ? channels : data.channel_count();
  const int n = data.input_dim();
  data.validate(m);

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector range = input_range(data);

  std::vector<ChannelStats> stats;
  for (int i = 0; i < m; ++i) stats.push_back(channel_stats(data, i));

  // Periodogram means are shared by all channels so that component q
  // overlaps across channels from the start.
  std::vector<Vector> pooled;
  if (strategy == InitStrategy::Periodogram) {
    pooled.assign(static_cast<std::size_t>(mixture_size), Vector::Zero(n));
    for (int d = 0; d < n; ++d) {
      double finest = std::numeric_limits<double>::infinity();
      for (const auto& st : stats) finest = std::min(finest, st.spacing[d]);
      const double lo = std::numbers::pi / range[d];
      const double hi = std::numbers::pi / finest;
      const double step = 2.0 * std::numbers::pi / (range[d] * 5.0);
      const int count = std::clamp(static_cast<int>((hi - lo) / step) + 1, 2, 4000);
      const Vector omegas = Vector::LinSpaced(count, lo, hi);
      Vector power = Vector::Zero(count);
      for (int i = 0; i < m; ++i) {
        const Dataset rows = data.channel_rows(i);
        if (rows.size() < 3) continue;
        const Vector p = lomb_scargle(rows.locations.col(d), rows.values, omegas);
        const double top = p.maxCoeff();
        if (top > 0.0) power += p / top;
      }
      std::vector<int> peaks;
      for (int t = 0; t < count; ++t) {
        const bool left = t == 0 || power[t] > power[t - 1];
        const bool right = t + 1 == count || power[t] >= power[t + 1];
        if (left && right && power[t] > 0.0) peaks.push_back(t);
      }
      std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) { return power[a] > power[b]; });
      // Drop leakage sidelobes within two fundamental frequencies of a stronger peak.
      const double min_gap = 4.0 * std::numbers::pi / range[d];
      std::vector<double> chosen;
      for (int t : peaks) {
        const bool apart = std::none_of(chosen.begin(), chosen.end(),
                                        [&](double w) { return std::abs(w - omegas[t]) < min_gap; });
        if (apart) chosen.push_back(omegas[t]);
        if (static_cast<int>(chosen.size()) == mixture_size) break;
      }
      for (int q = 0; q < mixture_size; ++q) {
        if (q < static_cast<int>(chosen.size())) {
          const double shift = (unit(gen) - 0.5) * 2.0 * std::numbers::pi / range[d];
          pooled[q][d] = std::max(0.0, chosen[static_cast<std::size_t>(q)] + shift);
        } else {
          pooled[q][d] = unit(gen) * hi;
        }
      }
    }
  }

  // Delays relative to channel 0 from the cross-correlation peak, and one
  // bandwidth per component so that each starts as a coherent latent process.
  Vector delays = Vector::Zero(m);
  std::vector<Vector> pooled_scales;
  if (strategy == InitStrategy::Periodogram) {
    if (n == 1) {
      for (int i = 1; i < m; ++i) delays[i] = -cross_correlation_lag(data, i);
    }
    for (int q = 0; q < mixture_size; ++q) {
      Vector s(n);
      for (int d = 0; d < n; ++d) {
        const double log_len = std::log(range[d] / 20.0) + unit(gen) * std::log(20.0);
        s[d] = std::exp(-2.0 * log_len);
      }
      pooled_scales.push_back(s);
    }
  }

  MosmKernel k(m, n, mixture_size, ConstraintMode::MOSM);
  for (int i = 0; i < m; ++i) {
    const ChannelStats& st = stats[static_cast<std::size_t>(i)];
    const double stddev = std::sqrt(st.variance);
    for (int q = 0; q < mixture_size; ++q) {
      SpectralComponent& c = k.component(i, q);
      if (pooled.empty()) {
        for (int d = 0; d < n; ++d) c.mean[d] = unit(gen) * std::numbers::pi / st.spacing[d];
      } else {
        c.mean = pooled[static_cast<std::size_t>(q)];
      }
      if (pooled_scales.empty()) {
        for (int d = 0; d < n; ++d) {
          const double log_len = std::log(range[d] / 20.0) + unit(gen) * std::log(20.0);
          c.scales[d] = std::exp(-2.0 * log_len);
        }
      } else {
        c.scales = pooled_scales[static_cast<std::size_t>(q)];
      }
      if (pooled.empty()) {
        c.weight = std::sqrt(stddev / mixture_size);
      } else {
        // k_ii(0) = variance / Q
        const double norm = std::pow(2.0 * std::numbers::pi, 0.5 * n) * std::sqrt(c.scales.prod());
        c.weight = std::sqrt(st.variance / mixture_size / norm);
      }
      c.delay.setConstant(delays[i]);
      c.phase = 0.0;
    }
    k.set_noise_var(i, 0.1 * st.variance);
  }
  return project_constraints(k, mode);
}

}  // namespace

MosmKernel initialize(const Dataset& data, int mixture_size, std::uint64_t seed, int channels,
                      ConstraintMode mode) {
  return initialize_impl(data, mixture_size, seed, channels, mode, InitStrategy::Uniform);
}

MosmKernel initialize_from_periodogram(const Dataset& data, int mixture_size, std::uint64_t seed,
                                       int channels, ConstraintMode mode) {
  return initialize_impl(data, mixture_size, seed, channels, mode, InitStrategy::Periodogram);
}

MosmKernel initialize(const Dataset& data, int mixture_size, std::uint64_t seed, int channels,
                      ConstraintMode mode, InitStrategy strategy) {
  return initialize_impl(data, mixture_size, seed, channels, mode, strategy);
}

Vector lomb_scargle(const Vector& x, const Vector& y, const Vector& omegas) {
  const Eigen::ArrayXd yc = y.array() - y.mean();
  Vector power(omegas.size());
  for (Eigen::Index t = 0; t < omegas.size(); ++t) {
    const double w = omegas[t];
    const Eigen::ArrayXd two = 2.0 * w * x.array();
    const double offset = std::atan2(two.sin().sum(), two.cos().sum()) / (2.0 * w);
    const Eigen::ArrayXd ph = w * (x.array() - offset);
    const Eigen::ArrayXd c = ph.cos();
    const Eigen::ArrayXd s = ph.sin();
    const double cc = c.square().sum();
    const double ss = s.square().sum();
    const double yc_c = (yc * c).sum();
    const double yc_s = (yc * s).sum();
    power[t] = 0.5 * ((cc > 0 ? yc_c * yc_c / cc : 0.0) + (ss > 0 ? yc_s * yc_s / ss : 0.0));
  }
  return power;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

namespace {

struct RunResult {
  bool ok = false;
  MosmKernel kernel;
  Trace trace;
  double final_nll = std::numeric_limits<double>::infinity();
};

RunResult run_once(const Dataset& data, const MosmKernel& start, const TrainConfig& cfg) {
  RunResult out{false, start, {}, std::numeric_limits<double>::infinity()};
  const FreeParameterization params(start);
  double last_jitter = 0.0;

  const Objective objective = [&](const Vector& x, Vector& grad) -> double {
    try {
      const MosmKernel k = params.to_kernel(x);
      const NllGradient ng = nll_grad(data, k);
      grad = params.reduce_gradient(ng.grad);
      last_jitter = ng.jitter;
      if (!std::isfinite(ng.value) || !grad.allFinite()) return std::numeric_limits<double>::infinity();
      return ng.value;
    } catch (const IllConditionedError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const ParameterDomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Vector x0 = params.from_kernel(start);
  Vector g0(x0.size());
  const double f0 = objective(x0, g0);
  if (!std::isfinite(f0)) return out;
  out.trace.push_back({0, f0, last_jitter});

  const IterateCallback record = [&](int iter, double value) {
    out.trace.push_back({iter, value, last_jitter});
  };
  OptimizerOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.f_tol = cfg.tolerance;
  opts.learning_rate = cfg.learning_rate;
  const OptimizerResult res = cfg.optimizer == OptimizerKind::Adam
                                  ? minimize_adam(objective, x0, opts, record)
                                  : minimize_lbfgs(objective, x0, opts, record);
  if (!std::isfinite(res.value)) return out;
  out.ok = true;
  out.kernel = params.to_kernel(res.x);
  out.final_nll = res.value;
  return out;
}

}  // namespace

FitResult fit(const Dataset& data, const MosmKernel& k0, const TrainConfig& cfg) {
  cfg.validate();
  k0.validate();
  if (data.empty()) throw DataError("cannot fit an empty dataset");
  if (data.input_dim() != k0.input_dim()) throw DataError("dataset input dimension does not match kernel");
  data.validate(k0.channels());

  const ConstraintMode mode = k0.mode();
  if (cfg.max_iters == 0) {
    FitResult res{k0, {}, 0.0, 0.0, 0, {}};
    const GpModel model(k0, data);
    res.initial_nll = res.final_nll = model.nll();
    res.trace.push_back({0, res.final_nll, model.jitter()});
    res.restart_nll.push_back(res.final_nll);
    return res;
  }

  std::vector<MosmKernel> starts;
  starts.push_back(regauge(project_constraints(k0, mode)));
  for (int r = 1; r < cfg.restarts; ++r) {
    starts.push_back(regauge(initialize(data, k0.mixture_size(), cfg.seed + static_cast<std::uint64_t>(r),
                                        k0.channels(), mode, cfg.init)));
  }

  std::vector<RunResult> runs;
  if (cfg.parallel_restarts && starts.size() > 1) {
    std::vector<std::future<RunResult>> jobs;
    for (const auto& s : starts) {
      jobs.push_back(std::async(std::launch::async, [&data, &cfg, s] { return run_once(data, s, cfg); }));
    }
    for (auto& j : jobs) runs.push_back(j.get());
  } else {
    for (const auto& s : starts) runs.push_back(run_once(data, s, cfg));
  }

  FitResult res{k0, {}, std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), -1, {}};
  if (!runs.front().trace.empty()) res.initial_nll = runs.front().trace.front().nll;
  std::size_t longest = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    res.restart_nll.push_back(runs[r].final_nll);
    if (runs[r].trace.size() > runs[longest].trace.size()) longest = r;
    if (runs[r].ok && runs[r].final_nll < res.final_nll) {
      res.final_nll = runs[r].final_nll;
      res.best_restart = static_cast<int>(r);
    }
  }
  if (res.best_restart < 0) {
    throw FitFailedError("all restarts were numerically ill-conditioned", runs[longest].trace);
  }
  res.kernel = runs[static_cast<std::size_t>(res.best_restart)].kernel;
  res.trace = runs[static_cast<std::size_t>(res.best_restart)].trace;
  return res;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const auto old = out.precision(17);
  out << "iteration,nll,jitter_used\n";
  for (const auto& e : trace) out << e.iteration << ',' << e.nll << ',' << e.jitter << '\n';
  out.precision(old);
}

}  // namespace mosm
