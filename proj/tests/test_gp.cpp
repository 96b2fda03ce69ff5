#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rbo/errors.hpp"
#include "rbo/gp.hpp"
#include "support/gp_suite.hpp"
#include "support/oracles.hpp"

using namespace rbo;

TEST_CASE("build_cov entries") {
  const Matrix a{{0.3, 0.4}};
  SUBCASE("self covariance carries the jitter") {
    const Matrix k = build_cov(a, a, {1.0, 2.0, 1e-8}, true);
    CHECK(k(0, 0) == doctest::Approx(2.0 * (1.0 + 1e-8)).epsilon(1e-15));
  }
  SUBCASE("unit squared distance") {
    const Matrix b{{0.3, 1.4}};
    const Matrix k = build_cov(a, b, {1.0, 1.0, 1e-8}, false);
    CHECK(k(0, 0) == doctest::Approx(0.367879).epsilon(1e-6));
  }
  SUBCASE("long lengthscale saturates") {
    const Matrix b{{1.0, 0.0}};
    const Matrix k = build_cov(a, b, {1e6, 3.0, 1e-8}, false);
    CHECK(std::abs(k(0, 0) - 3.0) <= 1e-5 * 3.0);
  }
  SUBCASE("cross covariance adds no jitter off the diagonal") {
    const Matrix two{{0.1}, {0.9}};
    const Matrix k = build_cov(two, two, {0.25, 1.0, 0.5}, true);
    CHECK(k(0, 1) == doctest::Approx(std::exp(-0.64 / 0.25)));
    CHECK(k(1, 1) == doctest::Approx(1.5));
  }
  CHECK_THROWS_AS(build_cov(a, Matrix{{0.1}}, {}, false), DimensionMismatch);
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset(Matrix(0, 1), {}), InvalidDataset);
  CHECK_THROWS_AS(Dataset(Matrix{{0.2}}, {1.0, 2.0}), InvalidDataset);
  CHECK_THROWS_AS(Dataset(Matrix{{1.2}}, {1.0}), InvalidDataset);
  CHECK_THROWS_AS(Dataset(Matrix{{0.2}}, {std::nan("")}), InvalidDataset);
  CHECK_THROWS_AS(Dataset(Matrix{{0.2}, {0.2}}, {1.0, 2.0}), InvalidDataset);
  const Dataset d(Matrix{{0.2}}, {1.0});
  const std::vector<double> p{0.2};
  CHECK(d.contains(p));
  CHECK_THROWS_AS(d.with(p, 3.0), InvalidDataset);
  const std::vector<double> q{0.7};
  CHECK(d.with(q, 3.0).size() == 2);
}

TEST_CASE("single observation scale estimate") {
  const GpModel m = fit(Dataset(Matrix{{0.5}}, {2.0}), 0.25);
  CHECK(m.hyperparams().tau2 == doctest::Approx(4.0 / (1.0 + 1e-8)).epsilon(1e-14));
  CHECK(m.factor().order() == 1);
  CHECK_FALSE(m.degenerate());
}

TEST_CASE("zero responses are flagged and predict zero variance") {
  const GpModel m = fit(Dataset(Matrix{{0.1}, {0.6}}, {0.0, 0.0}), 0.25);
  CHECK(m.degenerate());
  const PredictiveMoments pm = predict(m, Matrix{{0.3}, {0.9}});
  CHECK(pm.var[0] == 0.0);
  CHECK(pm.var[1] == 0.0);
  CHECK(pm.mu[0] == 0.0);
}

TEST_CASE("two-point scale estimate against the explicit 2x2 inverse") {
  const Matrix x{{0.2}, {0.7}};
  const std::vector<double> y{1.0, -1.0};
  const double theta = 1e3;
  const GpModel m = fit(Dataset(x, y), theta);
  const double eps = 1e-8;
  const double r = std::exp(-0.25 / theta);
  const double a = 1.0 + eps;
  const double det = a * a - r * r;
  // y^T C^{-1} y with C^{-1} = [a -r; -r a] / det
  const double quad = (a * 1.0 + a * 1.0 + 2.0 * r) / det;
  CHECK(m.hyperparams().tau2 == doctest::Approx(quad / 2.0).epsilon(1e-9));
}

TEST_CASE("midpoint prediction against hand algebra") {
  const Matrix x{{0.2}, {0.6}};
  const std::vector<double> y{1.5, -0.5};
  const double theta = 0.25, eps = 1e-8;
  const GpModel m = fit(Dataset(x, y), theta, eps);
  const double r = std::exp(-0.16 / theta);
  const double a = 1.0 + eps;
  const double det = a * a - r * r;
  const double ka = std::exp(-0.04 / theta);
  // k = (ka, ka) by symmetry; C^{-1} k = ka (a - r) / det * (1, 1)
  const double w = ka * (a - r) / det;
  const double mu = w * (y[0] + y[1]);
  const double quad = (a * y[0] * y[0] + a * y[1] * y[1] - 2.0 * r * y[0] * y[1]) / det;
  const double tau2 = quad / 2.0;
  const double var = tau2 * (1.0 + eps - 2.0 * ka * w);
  const PredictiveMoments pm = predict(m, Matrix{{0.4}});
  CHECK(pm.mu[0] == doctest::Approx(mu).epsilon(1e-10));
  CHECK(pm.var[0] == doctest::Approx(var).epsilon(1e-8));
}

TEST_CASE("agreement with an explicit-inverse posterior") {
  std::mt19937_64 gen(5);
  for (std::size_t d : {1u, 2u, 3u}) {
    const Matrix x = suite::spread_points(12, d, 0.05, gen);
    std::vector<double> y(12);
    std::normal_distribution<double> z;
    for (double& v : y) v = z(gen);
    const GpModel m = fit(Dataset(x, y), 0.3);
    const oracle::NaiveGp ref(oracle::dense(x), y, 0.3);
    CHECK(m.hyperparams().tau2 == doctest::Approx(ref.tau2).epsilon(1e-7));
    const Matrix q = suite::spread_points(20, d, 0.0, gen);
    const PredictiveMoments pm = predict(m, q);
    for (std::size_t k = 0; k < q.rows(); ++k) {
      const std::vector<double> qk(q.row(k).begin(), q.row(k).end());
      CHECK(pm.mu[k] == doctest::Approx(ref.mean(qk)).epsilon(1e-6));
      CHECK(std::abs(pm.var[k] - ref.var(qk)) <= 1e-6 * ref.tau2);
    }
    const auto mu_only = predict_mean(m, q);
    for (std::size_t k = 0; k < q.rows(); ++k) CHECK(mu_only[k] == doctest::Approx(pm.mu[k]).epsilon(1e-12));
  }
}

TEST_CASE("reversion to the prior far from the data") {
  const GpModel m = fit(Dataset(Matrix{{0.0}, {0.05}}, {2.0, -1.0}), 0.01);
  const PredictiveMoments pm = predict(m, Matrix{{1.0}});
  // exp(-0.9025/0.01) is far below 1e-12
  CHECK(std::abs(pm.mu[0]) <= 1e-12);
  CHECK(pm.var[0] == doctest::Approx(m.hyperparams().tau2 * (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("training-point queries interpolate") {
  const Matrix x{{0.1, 0.2}, {0.5, 0.9}, {0.8, 0.3}, {0.3, 0.6}};
  const std::vector<double> y{0.3, -2.0, 4.5, 1.0};
  const GpModel m = fit(Dataset(x, y), 0.25);
  const PredictiveMoments pm = predict(m, x);
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(std::abs(pm.mu[i] - y[i]) <= 1e-6 * 4.5);
    CHECK(pm.var[i] <= 1e-6 * m.hyperparams().tau2);
  }
}

TEST_CASE("full covariance") {
  const GpModel m = fit(Dataset(Matrix{{0.1}, {0.5}, {0.9}}, {1.0, 0.0, 2.0}), 0.2);
  const Matrix q{{0.3}, {0.35}, {0.7}};
  const PredictiveMoments pm = predict(m, q, true);
  REQUIRE(pm.cov.has_value());
  const Matrix& c = *pm.cov;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(c(i, i) == doctest::Approx(pm.var[i]));
    for (std::size_t j = 0; j < 3; ++j) CHECK(c(i, j) == doctest::Approx(c(j, i)));
  }
  // Posterior covariance is positive semidefinite.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(c(i, j) * c(i, j) <= c(i, i) * c(j, j) * (1.0 + 1e-9));
  CHECK_FALSE(predict(m, q).cov.has_value());
  CHECK_THROWS_AS(predict(m, Matrix{{0.1, 0.2}}), DimensionMismatch);
}

TEST_CASE("log likelihood with pinned unit scale") {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const GpModel zero = fit(Dataset(Matrix{{0.5}}, {0.0}), 0.25);
  CHECK(log_likelihood(zero, 1.0) == doctest::Approx(-0.918939).epsilon(1e-6));
  CHECK(log_likelihood(zero, 1.0) == doctest::Approx(-half_log_2pi).epsilon(1e-7));
  const GpModel one = fit(Dataset(Matrix{{0.5}}, {1.0}), 0.25);
  CHECK(log_likelihood(one, 1.0) == doctest::Approx(-1.418939).epsilon(1e-6));
}

TEST_CASE("profile log likelihood under response scaling") {
  const Matrix x{{0.1}, {0.4}, {0.75}, {0.95}};
  const std::vector<double> y{0.5, -1.0, 2.0, 0.3};
  const GpModel m = fit(Dataset(x, y), 0.1);
  for (double c : {0.1, 2.0, -7.0}) {
    std::vector<double> yc = y;
    for (double& v : yc) v *= c;
    const GpModel mc = fit(Dataset(x, yc), 0.1);
    CHECK(mc.hyperparams().tau2 == doctest::Approx(c * c * m.hyperparams().tau2).epsilon(1e-10));
    // Profile likelihood shifts by -n log|c|.
    CHECK(log_likelihood(mc) == doctest::Approx(log_likelihood(m) - 4.0 * std::log(std::abs(c))).epsilon(1e-10));
  }
  // The profile scale maximizes the likelihood over tau2.
  const double best = log_likelihood(m);
  for (double f : {0.5, 0.9, 1.1, 2.0}) CHECK(log_likelihood(m, f * m.hyperparams().tau2) < best);
}

TEST_CASE("randomized property sweep") {
  const suite::GpSuiteReport r = suite::run_gp_suite(60);
  MESSAGE("datasets " << r.datasets << ", rejected as ill-conditioned " << r.rejected);
  INFO("worst interpolation " << r.worst_interp << ", permutation " << r.worst_perm << ", scale "
                              << r.worst_scale);
  CHECK(r.interpolation == 0);
  CHECK(r.permutation == 0);
  CHECK(r.variance_bounds == 0);
  CHECK(r.scale == 0);
}
