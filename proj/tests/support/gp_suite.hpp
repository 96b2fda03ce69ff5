#pragma once

// Randomized GP property sweep shared by the unit tests and the acceptance
// runner. Returns violation counts instead of asserting.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rbo/gp.hpp"
#include "support/oracles.hpp"

namespace suite {

struct GpSuiteReport {
  std::size_t datasets = 0;
  std::size_t rejected = 0;  // designs too ill-conditioned for the tolerances
  std::size_t checks = 0;
  std::size_t interpolation = 0;
  std::size_t permutation = 0;
  std::size_t variance_bounds = 0;
  std::size_t scale = 0;
  double worst_interp = 0.0;
  double worst_perm = 0.0;
  double worst_scale = 0.0;

  std::size_t violations() const { return interpolation + permutation + variance_bounds + scale; }
};

// Points drawn uniformly, redrawn until no pair is closer than min_sep.
inline rbo::Matrix spread_points(std::size_t n, std::size_t d, double min_sep, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  rbo::Matrix x(0, d);
  std::vector<double> p(d);
  while (x.rows() < n) {
    for (double& v : p) v = u(gen);
    bool ok = true;
    for (std::size_t i = 0; i < x.rows() && ok; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (x(i, j) - p[j]) * (x(i, j) - p[j]);
      ok = std::sqrt(s) >= min_sep;
    }
    if (ok) x.append_row(p);
  }
  return x;
}

// Infinity norm of the inverse jittered correlation matrix, via Gauss-Jordan.
inline double inverse_norm(const rbo::Matrix& x, double theta, double eps = 1e-8) {
  const std::size_t n = x.rows();
  oracle::Dense c(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c[i][j] = std::exp(-oracle::sqdist(x.row(i).data(), x.row(j).data(), x.cols()) / theta) + (i == j ? eps : 0.0);
  const oracle::Dense inv = oracle::inverse(c);
  double worst = 0.0;
  for (const auto& row : inv) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    worst = std::max(worst, s);
  }
  return worst;
}

// The jitter perturbs training-point means by eps * (C^{-1} y)_i, so the
// interpolation tolerance needs ||C^{-1}|| <= 100.
inline constexpr double kMaxInverseNorm = 100.0;

inline GpSuiteReport run_gp_suite(std::size_t n_datasets, std::uint64_t seed = 20240601) {
  GpSuiteReport rep;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t dims[] = {1, 2, 3, 4};
  const double thetas[] = {0.01, 0.05, 0.25};
  for (std::size_t t = 0; t < n_datasets; ++t) {
    const std::size_t d = dims[t % 4];
    double theta = thetas[(t / 4) % 3];
    const std::size_t n = 5 + gen() % 16;
    rbo::Matrix x = spread_points(n, d, 0.02, gen);
    for (int tries = 1; inverse_norm(x, theta) > kMaxInverseNorm; ++tries) {
      ++rep.rejected;
      if (tries % 10 == 0) theta *= 0.5;
      x = spread_points(n, d, 0.02, gen);
    }
    std::vector<double> y(n);
    for (double& v : y) v = 3.0 * z(gen) + 1.0;
    const rbo::Dataset data(x, y);
    const rbo::GpModel m = rbo::fit(data, theta);
    const double tau2 = m.hyperparams().tau2;
    const double eps = m.hyperparams().eps;
    ++rep.datasets;

    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    const rbo::PredictiveMoments at_train = rbo::predict(m, x);
    for (std::size_t i = 0; i < n; ++i) {
      ++rep.checks;
      const double err = std::abs(at_train.mu[i] - y[i]);
      rep.worst_interp = std::max(rep.worst_interp, err / (1.0 + ymax));
      if (err > 1e-6 * (1.0 + ymax) || at_train.var[i] > 1e-6 * tau2) ++rep.interpolation;
    }

    rbo::Matrix q(0, d);
    std::vector<double> p(d);
    for (int k = 0; k < 64; ++k) {
      for (double& v : p) v = u(gen);
      q.append_row(p);
    }
    const rbo::PredictiveMoments pm = rbo::predict(m, q);
    for (std::size_t k = 0; k < q.rows(); ++k) {
      ++rep.checks;
      if (!(pm.var[k] >= 0.0 && pm.var[k] <= tau2 * (1.0 + eps) * (1.0 + 1e-12))) ++rep.variance_bounds;
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    rbo::Matrix xp(0, d);
    std::vector<double> yp;
    for (std::size_t i : perm) {
      xp.append_row(x.row(i));
      yp.push_back(y[i]);
    }
    const rbo::PredictiveMoments pp = rbo::predict(rbo::fit(rbo::Dataset(xp, yp), theta), q);
    for (std::size_t k = 0; k < q.rows(); ++k) {
      ++rep.checks;
      const double dev = std::max(std::abs(pp.mu[k] - pm.mu[k]), std::abs(pp.var[k] - pm.var[k]));
      rep.worst_perm = std::max(rep.worst_perm, dev);
      if (dev > 1e-10) ++rep.permutation;
    }

    for (double c : {-3.0, 0.5, 10.0}) {
      std::vector<double> yc = y;
      for (double& v : yc) v *= c;
      const rbo::PredictiveMoments pc = rbo::predict(rbo::fit(rbo::Dataset(x, yc), theta), q);
      for (std::size_t k = 0; k < q.rows(); ++k) {
        ++rep.checks;
        const double mu_ref = c * pm.mu[k];
        const double var_ref = c * c * pm.var[k];
        const double emu = std::abs(pc.mu[k] - mu_ref) / std::max(std::abs(mu_ref), std::abs(c) * 1e-3);
        const double evar = std::abs(pc.var[k] - var_ref) / std::max(var_ref, c * c * tau2 * 1e-6);
        rep.worst_scale = std::max({rep.worst_scale, emu, evar});
        if (emu > 1e-8 || evar > 1e-8) ++rep.scale;
      }
    }
  }
  return rep;
}

}  // namespace suite
