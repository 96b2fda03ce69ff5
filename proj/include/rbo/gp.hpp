#pragma once

// Zero-mean Gaussian-process surrogate with a squared-exponential kernel,
// fixed lengthscale and profile (analytic) scale estimate.

#include <optional>
#include <span>
#include <vector>

#include "rbo/linalg.hpp"

namespace rbo {

inline constexpr double kDefaultJitter = 1e-8;

/// Training pairs (X, Y). Inputs live in [0,1]^d and rows are pairwise
/// distinct; violations throw InvalidDataset.
class Dataset {
 public:
  Dataset(Matrix x, std::vector<double> y);

  std::size_t size() const { return x_.rows(); }
  std::size_t dim() const { return x_.cols(); }
  const Matrix& inputs() const { return x_; }
  const std::vector<double>& responses() const { return y_; }

  /// Returns a copy extended by one evaluation.
  Dataset with(std::span<const double> x, double y) const;
  /// True when `x` lies within 1e-12 of a stored row.
  bool contains(std::span<const double> x) const;

 private:
  Matrix x_;
  std::vector<double> y_;
};

struct Hyperparams {
  double theta = 1.0;  // lengthscale, in squared-distance units
  double tau2 = 1.0;
  double eps = kDefaultJitter;
};

/// Covariance between the rows of `a` and `b`:
/// tau2 * exp(-|a_i - b_j|^2 / theta), with tau2 * eps added where i == j
/// when `self_cov` is set.
Matrix build_cov(const Matrix& a, const Matrix& b, const Hyperparams& hp, bool self_cov);

struct PredictiveMoments {
  std::vector<double> mu;
  std::vector<double> var;
  std::optional<Matrix> cov;

  std::size_t size() const { return mu.size(); }
  double sd(std::size_t i) const;
};

class GpModel {
 public:
  const Dataset& data() const { return data_; }
  const Hyperparams& hyperparams() const { return hp_; }
  const CholFactor& factor() const { return factor_; }
  /// C^{-1} Y for the jittered correlation matrix C.
  const std::vector<double>& kinvy() const { return kinvy_; }
  /// Set when every response is zero, so the scale estimate collapses.
  bool degenerate() const { return degenerate_; }

 private:
  friend GpModel fit(const Dataset& d, double theta, double eps);
  GpModel(Dataset d, Hyperparams hp, CholFactor f, std::vector<double> kinvy, bool degenerate)
      : data_(std::move(d)), hp_(hp), factor_(std::move(f)), kinvy_(std::move(kinvy)),
        degenerate_(degenerate) {}

  Dataset data_;
  Hyperparams hp_;
  CholFactor factor_;
  std::vector<double> kinvy_;
  bool degenerate_;
};

/// Factorizes the correlation matrix and sets tau2 = Y^T C^{-1} Y / n.
GpModel fit(const Dataset& d, double theta, double eps = kDefaultJitter);

PredictiveMoments predict(const GpModel& m, const Matrix& xq, bool full = false);

/// Predictive mean only; skips the triangular solves needed for variances.
std::vector<double> predict_mean(const GpModel& m, const Matrix& xq);

/// MVN log density of Y under the fitted covariance tau2 * C.
double log_likelihood(const GpModel& m);
/// Same, with the scale pinned to `tau2` instead of the profile estimate.
double log_likelihood(const GpModel& m, double tau2);

}  // namespace rbo
