#include <doctest.h>

#include <sstream>

#include "mosm/errors.hpp"
#include "mosm/synth.hpp"
#include "mosm/training.hpp"

using namespace mosm;

namespace {

std::vector<SmComponent> sm(double w, double mu, double s) {
  return {{w, Vector::Constant(1, mu), Vector::Constant(1, s)}};
}

Vector v1(double x) { return Vector::Constant(1, x); }

}  // namespace

TEST_CASE("path moments match the kernel") {
  const auto kernel = sm(1.0, 3.0, 0.05);
  const Vector grid = Vector::LinSpaced(21, 0.0, 2.0);
  const int draws = 2000;
  double var = 0.0, cov = 0.0;
  for (int s = 0; s < draws; ++s) {
    const Vector p = sample_gp_path(kernel, grid, static_cast<std::uint64_t>(s));
    var += p[5] * p[5];
    cov += p[5] * p[10];
  }
  var /= draws;
  cov /= draws;
  const double k0 = sm_kernel(kernel, v1(0.0));
  const double kt = sm_kernel(kernel, v1(grid[10] - grid[5]));
  CHECK(std::abs(var - k0) <= 0.05 * k0);
  CHECK(std::abs(cov - kt) <= 0.05 * k0);
}

TEST_CASE("path draws are deterministic and vanish for zero weight") {
  const Vector grid = Vector::LinSpaced(50, -1.0, 1.0);
  CHECK(sample_gp_path(sm(1.0, 1.0, 0.5), grid, 4) == sample_gp_path(sm(1.0, 1.0, 0.5), grid, 4));
  CHECK(sample_gp_path(sm(0.0, 1.0, 0.5), grid, 4).isZero());
}

TEST_CASE("forward-difference derivative") {
  const Vector grid = Vector::LinSpaced(101, 0.0, 1.0);
  const Vector lin = 2.5 * grid;
  const Vector d = derivative_channel(grid, lin);
  CHECK((d.array() - 2.5).abs().maxCoeff() <= 1e-12);
  CHECK(derivative_channel(grid, Vector::Constant(101, 4.0)).isZero());

  const Vector fine = Vector::LinSpaced(2001, 0.0, 2.0);
  const Vector ds = derivative_channel(fine, fine.array().sin().matrix());
  const double h = fine[1] - fine[0];
  CHECK((ds.head(2000) - fine.head(2000).array().cos().matrix()).cwiseAbs().maxCoeff() <= h);
  CHECK(ds[2000] == ds[1999]);
}

TEST_CASE("delay by grid shifts") {
  const Vector grid = Vector::LinSpaced(11, 0.0, 1.0);
  const Vector v = grid.array().square();
  CHECK(delay_channel(grid, v, 0.0) == v);
  const Vector one = delay_channel(grid, v, 0.1);
  CHECK(std::isnan(one[0]));
  for (int t = 1; t < 11; ++t) CHECK(one[t] == v[t - 1]);
  const Vector twice = delay_channel(grid, one, 0.1);
  const Vector two = delay_channel(grid, v, 0.2);
  for (int t = 2; t < 11; ++t) CHECK(twice[t] == two[t]);
  CHECK_THROWS_AS(delay_channel(grid, v, 0.15), DataError);
}

TEST_CASE("default benchmark has the standard counts and layout") {
  const SynthConfig cfg;
  const SynthData data = make_synthetic(cfg);
  CHECK(data.train.size() == 500 + 400 + 400);
  CHECK(data.train.channel_rows(0).size() == 500);
  CHECK(data.train.channel_rows(1).size() == 400);
  CHECK(data.train.channel_rows(2).size() == 400);
  CHECK(data.train.channel_rows(1).locations.maxCoeff() <= 0.0);
  CHECK(data.train.channel_rows(2).locations.maxCoeff() <= 0.0);
  CHECK(data.train.channel_rows(0).locations.minCoeff() >= -20.0);
  CHECK(data.test.channel_rows(1).locations.minCoeff() >= 0.0);
  CHECK(data.test.channel_rows(0).locations.minCoeff() == doctest::Approx(-20.0));
}

TEST_CASE("noise-free dense draws lie on the generated path") {
  SynthConfig cfg;
  cfg.noise_std = 0.0;
  cfg.grid = {-4.0, 4.0};
  cfg.train_reference = {-3.0, 3.0};
  cfg.train_derivative = {-3.0, 0.0};
  cfg.train_delayed = {-3.0, 0.0};
  cfg.test_reference = {-3.0, 3.0};
  cfg.test_derivative = {0.0, 3.0};
  cfg.test_delayed = {0.0, 3.0};
  cfg.n_reference = 290;
  cfg.n_derivative = 140;
  cfg.n_delayed = 140;
  const SynthData data = make_synthetic(cfg);
  for (int r = 0; r < data.train.size(); ++r) {
    const double x = data.train.locations(r, 0);
    const auto g = static_cast<Eigen::Index>(std::lround((x - cfg.grid.lo) / cfg.grid_step));
    const int c = data.train.channels[static_cast<std::size_t>(r)];
    const Vector& src = c == 0 ? data.reference : c == 1 ? data.derivative : data.delayed;
    CHECK(data.train.values[r] == src[g]);
  }
}

TEST_CASE("generation is reproducible from config and seed") {
  SynthConfig cfg;
  cfg.n_reference = 50;
  cfg.n_derivative = 30;
  cfg.n_delayed = 30;
  cfg.seed = 17;
  const SynthData a = make_synthetic(cfg);
  const SynthData b = make_synthetic(cfg);
  CHECK(a.train.values == b.train.values);
  CHECK(a.train.locations == b.train.locations);
  cfg.seed = 18;
  CHECK(make_synthetic(cfg).train.values != a.train.values);

  const SynthConfig back = SynthConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK_THROWS_AS(SynthConfig::from_json(nlohmann::json{{"n_reference", -1}}), ConfigError);
}

TEST_CASE("truth table entries follow the SM kernel") {
  SynthConfig cfg;
  cfg.n_reference = 20;
  cfg.n_derivative = 10;
  cfg.n_delayed = 10;
  const SynthData data = make_synthetic(cfg);
  const auto gen = cfg.generator();
  int delayed_rows = 0;
  for (const TruthRow& r : data.truth) {
    if (r.channel_i == 1 && r.channel_j == 3) {
      ++delayed_rows;
      CHECK(r.value == doctest::Approx(sm_kernel(gen, v1(r.tau + cfg.delay))).epsilon(1e-14));
    }
    if (r.channel_i == 1 && r.channel_j == 1) {
      CHECK(r.value == doctest::Approx(sm_kernel(gen, v1(r.tau))).epsilon(1e-14));
    }
  }
  CHECK(delayed_rows == 401);

  // dk and d2k against central differences.
  for (double t : {-1.3, 0.0, 0.4, 2.2}) {
    const double h = 1e-4;
    const SmDerivatives d = sm_kernel_derivatives(gen, t);
    const double dk = (sm_kernel(gen, v1(t + h)) - sm_kernel(gen, v1(t - h))) / (2 * h);
    const double d2k = (sm_kernel(gen, v1(t + h)) - 2 * d.k + sm_kernel(gen, v1(t - h))) / (h * h);
    CHECK(d.dk == doctest::Approx(dk).epsilon(1e-6));
    CHECK(d.d2k == doctest::Approx(d2k).epsilon(1e-4));
  }

  std::ostringstream out;
  write_truth_csv(out, data.truth);
  CHECK(out.str().rfind("tau,k_true,channel_i,channel_j\n", 0) == 0);
}

TEST_CASE("delayed cross-covariance matches Monte Carlo over paths") {
  SynthConfig cfg;
  const auto gen = cfg.generator();
  const Vector grid = Vector::LinSpaced(201, -2.0, 2.0);  // step 0.02
  const int draws = 2000;
  const int x = 120;                // location index of the delayed channel
  const std::vector<int> lags{-25, 0, 50};  // tau in grid steps
  std::vector<double> acc(lags.size(), 0.0);
  for (int s = 0; s < draws; ++s) {
    const Vector p = sample_gp_path(gen, grid, static_cast<std::uint64_t>(1000 + s));
    const Vector d = delay_channel(grid, p, cfg.delay);
    for (std::size_t l = 0; l < lags.size(); ++l) acc[l] += p[x + lags[l]] * d[x];
  }
  const double k0 = sm_kernel(gen, v1(0.0));
  for (std::size_t l = 0; l < lags.size(); ++l) {
    const double tau = 0.02 * lags[l];
    CHECK(std::abs(acc[l] / draws - sm_kernel(gen, v1(tau + cfg.delay))) <= 0.05 * k0);
  }
}

TEST_CASE("reference periodogram peaks near the generator frequency") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    const SynthData data = make_synthetic(cfg);
    const Dataset ref = data.train.channel_rows(0);
    const Vector omegas = Vector::LinSpaced(600, 0.05, 12.0);
    const Vector power = lomb_scargle(ref.locations.col(0), ref.values, omegas);
    Eigen::Index best = 0;
    power.maxCoeff(&best);
    CHECK(std::abs(omegas[best] - cfg.means[0]) <= 2.0 * std::sqrt(cfg.scales[0]));
  }
}

TEST_CASE("delayed channel correlates best with the reference at the delay") {
  SynthConfig cfg;
  cfg.noise_std = 0.0;
  const SynthData data = make_synthetic(cfg);
  const double step = cfg.grid_step;
  int best_lag = 0;
  double best = -1e300;
  for (int lag = 0; lag <= 100; ++lag) {
    double sum = 0.0;
    for (Eigen::Index g = 200; g + 200 < data.grid.size(); ++g) sum += data.delayed[g] * data.reference[g - lag];
    if (sum > best) {
      best = sum;
      best_lag = lag;
    }
  }
  CHECK(best_lag * step == doctest::Approx(cfg.delay));
}

TEST_CASE("mae") {
  Vector a(3), b(3);
  a << 1, 2, 3;
  b << 2, 2, 1;
  CHECK(mae(a, a) == 0.0);
  CHECK(mae(Vector::Zero(4), Vector::Ones(4)) == 1.0);
  CHECK(mae(a, b) == doctest::Approx(1.0));
  CHECK_THROWS(mae(a, Vector::Zero(2)));
  CHECK_THROWS(mae(Vector(), Vector()));
}
