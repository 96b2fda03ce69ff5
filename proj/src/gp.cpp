#include "rbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rbo/errors.hpp"

namespace rbo {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

void check_dim(const GpModel& m, const Matrix& xq) {
  if (xq.cols() != m.data().dim()) {
    throw DimensionMismatch("query dimension " + std::to_string(xq.cols()) +
                            " does not match training dimension " +
                            std::to_string(m.data().dim()));
  }
}

}  // namespace

Dataset::Dataset(Matrix x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() == 0 || x_.cols() == 0) throw InvalidDataset("dataset needs n >= 1 and d >= 1");
  if (y_.size() != x_.rows()) {
    throw InvalidDataset("dataset has " + std::to_string(x_.rows()) + " inputs but " +
                         std::to_string(y_.size()) + " responses");
  }
  for (double v : x_.data()) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvalidDataset("dataset inputs must be finite and inside [0,1]");
    }
  }
  for (double v : y_) {
    if (!std::isfinite(v)) throw InvalidDataset("dataset responses must be finite");
  }
  for (std::size_t i = 1; i < x_.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::sqrt(squared_distance(x_.row(i), x_.row(j))) <= 1e-12) {
        throw InvalidDataset("duplicate design rows " + std::to_string(j) + " and " +
                             std::to_string(i));
      }
}

Dataset Dataset::with(std::span<const double> x, double y) const {
  Matrix nx = x_;
  nx.append_row(x);
  std::vector<double> ny = y_;
  ny.push_back(y);
  return Dataset(std::move(nx), std::move(ny));
}

bool Dataset::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x_.rows(); ++i)
    if (std::sqrt(squared_distance(x_.row(i), x)) <= 1e-12) return true;
  return false;
}

Matrix build_cov(const Matrix& a, const Matrix& b, const Hyperparams& hp, bool self_cov) {
  if (a.cols() != b.cols()) throw DimensionMismatch("build_cov: point dimensions differ");
  Matrix k(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double v = std::exp(-squared_distance(ai, b.row(j)) / hp.theta);
      if (self_cov && i == j) v += hp.eps;
      k(i, j) = hp.tau2 * v;
    }
  }
  return k;
}

double PredictiveMoments::sd(std::size_t i) const { return std::sqrt(var[i]); }

GpModel fit(const Dataset& d, double theta, double eps) {
  if (!(theta > 0.0)) throw std::invalid_argument("lengthscale theta must be positive");
  if (!(eps >= 0.0)) throw std::invalid_argument("jitter eps must be non-negative");
  Hyperparams hp{theta, 1.0, eps};
  CholFactor f = cholesky(build_cov(d.inputs(), d.inputs(), hp, true));
  std::vector<double> kinvy = solve_spd(f, d.responses());
  double quad = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) quad += d.responses()[i] * kinvy[i];
  hp.tau2 = std::max(quad, 0.0) / static_cast<double>(d.size());
  const bool degenerate = !(hp.tau2 > 0.0);
  return GpModel(d, hp, std::move(f), std::move(kinvy), degenerate);
}

std::vector<double> predict_mean(const GpModel& m, const Matrix& xq) {
  check_dim(m, xq);
  const Hyperparams corr{m.hyperparams().theta, 1.0, 0.0};
  const Matrix& x = m.data().inputs();
  std::vector<double> mu(xq.rows(), 0.0);
  for (std::size_t q = 0; q < xq.rows(); ++q) {
    const auto xqq = xq.row(q);
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
      s += std::exp(-squared_distance(xqq, x.row(i)) / corr.theta) * m.kinvy()[i];
    mu[q] = s;
  }
  return mu;
}

PredictiveMoments predict(const GpModel& m, const Matrix& xq, bool full) {
  check_dim(m, xq);
  const Hyperparams& hp = m.hyperparams();
  const Hyperparams corr{hp.theta, 1.0, hp.eps};
  const std::size_t n = m.data().size();
  const std::size_t nq = xq.rows();

  // Rows of kq are correlations k(x_q, X); each is turned into L^{-1} k in place.
  Matrix kq = build_cov(xq, m.data().inputs(), corr, false);
  PredictiveMoments out;
  out.mu.resize(nq);
  out.var.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    auto row = kq.row(q);
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += row[i] * m.kinvy()[i];
    out.mu[q] = mu;
    forward_substitute(m.factor(), row);
    double explained = 0.0;
    for (double v : row) explained += v * v;
    out.var[q] = std::max(0.0, hp.tau2 * (1.0 + hp.eps - explained));
  }
  if (full) {
    Matrix cov = build_cov(xq, xq, corr, true);
    for (std::size_t a = 0; a < nq; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const auto ra = kq.row(a);
        const auto rb = kq.row(b);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += ra[i] * rb[i];
        const double v = hp.tau2 * (cov(a, b) - s);
        cov(a, b) = v;
        cov(b, a) = v;
      }
    for (std::size_t a = 0; a < nq; ++a) cov(a, a) = out.var[a];
    out.cov = std::move(cov);
  }
  return out;
}

double log_likelihood(const GpModel& m, double tau2) {
  const double n = static_cast<double>(m.data().size());
  double quad = 0.0;
  for (std::size_t i = 0; i < m.data().size(); ++i)
    quad += m.data().responses()[i] * m.kinvy()[i];
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * (n * std::log(tau2) + log_det(m.factor())) -
         0.5 * quad / tau2;
}

double log_likelihood(const GpModel& m) { return log_likelihood(m, m.hyperparams().tau2); }

}  // namespace rbo
