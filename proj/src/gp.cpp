#include "mosm/gp.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "mosm/errors.hpp"

namespace mosm {

void Dataset::validate(int channel_count) const {
  const auto n = static_cast<Eigen::Index>(channels.size());
  if (locations.rows() != n || values.size() != n) {
    throw DataError("dataset fields have different lengths");
  }
  if (!locations.allFinite() || !values.allFinite()) {
    throw DataError("dataset contains non-finite values");
  }
  for (int c : channels) {
    if (c < 0 || c >= channel_count) {
      std::ostringstream msg;
      msg << "channel id " << c + 1 << " outside [1, " << channel_count << "]";
      throw DataError(msg.str());
    }
  }
}

int Dataset::channel_count() const {
  return channels.empty() ? 0 : *std::max_element(channels.begin(), channels.end()) + 1;
}

Dataset Dataset::select(const std::vector<int>& rows) const {
  Dataset out;
  out.locations.resize(static_cast<Eigen::Index>(rows.size()), locations.cols());
  out.values.resize(static_cast<Eigen::Index>(rows.size()));
  out.channels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = rows[r];
    out.locations.row(static_cast<Eigen::Index>(r)) = locations.row(src);
    out.values[static_cast<Eigen::Index>(r)] = values[src];
    out.channels.push_back(channels[static_cast<std::size_t>(src)]);
  }
  return out;
}

Dataset Dataset::channel_rows(int channel) const {
  std::vector<int> rows;
  for (int r = 0; r < size(); ++r) {
    if (channels[static_cast<std::size_t>(r)] == channel) rows.push_back(r);
  }
  return select(rows);
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.input_dim() != b.input_dim()) throw DataError("cannot concatenate datasets of different input dimension");
  Dataset out;
  out.locations.resize(a.size() + b.size(), a.input_dim());
  out.locations << a.locations, b.locations;
  out.values.resize(a.size() + b.size());
  out.values << a.values, b.values;
  out.channels = a.channels;
  out.channels.insert(out.channels.end(), b.channels.begin(), b.channels.end());
  return out;
}

namespace {

void check_compatible(const MosmKernel& k, const Dataset& d) {
  if (d.input_dim() != k.input_dim()) throw DataError("dataset input dimension does not match kernel");
  d.validate(k.channels());
}

}  // namespace

Matrix cross_gram(const MosmKernel& k, const Dataset& rows, const Dataset& cols) {
  check_compatible(k, rows);
  check_compatible(k, cols);
  const CrossParamTable table(k);
  const int n = k.input_dim();
  Matrix out(rows.size(), cols.size());
  Vector tau(n);
  for (int s = 0; s < cols.size(); ++s) {
    for (int r = 0; r < rows.size(); ++r) {
      tau = (rows.locations.row(r) - cols.locations.row(s)).transpose();
      out(r, s) = table.value(rows.channels[static_cast<std::size_t>(r)],
                              cols.channels[static_cast<std::size_t>(s)], tau.data());
    }
  }
  return out;
}

Matrix gram(const MosmKernel& k, const Dataset& data) {
  check_compatible(k, data);
  const CrossParamTable table(k);
  const int n = k.input_dim();
  const int size = data.size();
  Matrix out(size, size);
  Vector tau(n);
  for (int s = 0; s < size; ++s) {
    const int cs = data.channels[static_cast<std::size_t>(s)];
    for (int r = s; r < size; ++r) {
      for (int d = 0; d < n; ++d) tau[d] = data.locations(r, d) - data.locations(s, d);
      const double v = table.value(data.channels[static_cast<std::size_t>(r)], cs, tau.data());
      out(r, s) = v;
      out(s, r) = v;
    }
    out(s, s) += k.noise_var(cs);
  }
  return out;
}

JitteredCholesky cholesky_jitter(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky_jitter needs a square matrix");
  if (!a.allFinite()) throw IllConditionedError("matrix has non-finite entries");
  const double scale = a.rows() > 0 ? a.diagonal().mean() : 1.0;
  Matrix work = a;
  double applied = 0.0;
  for (double level : kJitterLevels) {
    const double eps = level * std::abs(scale);
    work.diagonal().array() += eps - applied;
    applied = eps;
    Eigen::LLT<Matrix> llt(work);
    if (llt.info() == Eigen::Success) {
      Matrix lower = llt.matrixL();
      if (lower.diagonal().minCoeff() > 0.0 && lower.allFinite()) {
        return JitteredCholesky{std::move(lower), eps};
      }
    }
  }
  throw IllConditionedError("Cholesky factorization failed at the largest jitter level");
}

double nll_from_factor(const Matrix& lower, const Vector& y) {
  const Vector z = lower.triangularView<Eigen::Lower>().solve(y);
  const double n = static_cast<double>(y.size());
  return 0.5 * n * std::log(2.0 * std::numbers::pi) + lower.diagonal().array().log().sum() +
         0.5 * z.squaredNorm();
}

GpModel::GpModel(MosmKernel kernel, Dataset data) : kernel_(std::move(kernel)), data_(std::move(data)) {
  if (data_.empty()) throw DataError("GP model needs at least one observation");
  kernel_.validate();
  refresh();
}

void GpModel::set_kernel(MosmKernel kernel) {
  kernel.validate();
  kernel_ = std::move(kernel);
  refresh();
}

void GpModel::refresh() {
  chol_ = cholesky_jitter(gram(kernel_, data_));
  alpha_ = chol_.lower.triangularView<Eigen::Lower>().solve(data_.values);
  chol_.lower.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
}

double GpModel::nll() const { return nll_from_factor(chol_.lower, data_.values); }

double nll(const GpModel& model) { return model.nll(); }

Posterior GpModel::posterior(const Dataset& queries, bool include_noise) const {
  if (queries.empty()) throw DataError("posterior needs at least one query");
  const Matrix k_star = cross_gram(kernel_, data_, queries);  // N x M
  Matrix k_qq = cross_gram(kernel_, queries, queries);
  Posterior post;
  post.mean = k_star.transpose() * alpha_;
  const Matrix v = chol_.lower.triangularView<Eigen::Lower>().solve(k_star);
  post.cov = k_qq - v.transpose() * v;
  post.cov = 0.5 * (post.cov + post.cov.transpose()).eval();
  if (include_noise) {
    for (int r = 0; r < queries.size(); ++r) {
      post.cov(r, r) += kernel_.noise_var(queries.channels[static_cast<std::size_t>(r)]);
    }
  }
  return post;
}

MarginalPosterior GpModel::marginal(const Dataset& queries, bool include_noise) const {
  if (queries.empty()) throw DataError("posterior needs at least one query");
  const Matrix k_star = cross_gram(kernel_, data_, queries);
  const Matrix v = chol_.lower.triangularView<Eigen::Lower>().solve(k_star);
  const CrossParamTable table(kernel_);
  const Vector zero = Vector::Zero(kernel_.input_dim());
  MarginalPosterior post;
  post.mean = k_star.transpose() * alpha_;
  post.variance.resize(queries.size());
  for (int r = 0; r < queries.size(); ++r) {
    const int c = queries.channels[static_cast<std::size_t>(r)];
    double var = table.value(c, c, zero.data()) - v.col(r).squaredNorm();
    if (include_noise) var += kernel_.noise_var(c);
    post.variance[r] = std::max(var, 0.0);
  }
  return post;
}

Vector GpModel::predict_mean(const Dataset& queries) const {
  if (queries.empty()) throw DataError("posterior needs at least one query");
  return cross_gram(kernel_, data_, queries).transpose() * alpha_;
}

}  // namespace mosm
