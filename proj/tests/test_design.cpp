#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "rbo/design.hpp"

using namespace rbo;

namespace {

bool strata_ok(const Matrix& x) {
  const std::size_t n = x.rows();
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::vector<bool> hit(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x(i, j);
      if (!(v >= 0.0 && v < 1.0)) return false;
      const auto k = static_cast<std::size_t>(std::floor(v * static_cast<double>(n)));
      if (k >= n || hit[k]) return false;
      hit[k] = true;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
    vd.push_back(d.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  Rng s1 = Rng(42, 0).substream("init"), s2 = Rng(42, 0).substream("init"), s3 = Rng(42, 0).substream("acq");
  CHECK(s1.next_u64() == s2.next_u64());
  CHECK(Rng(42, 0).substream("init").next_u64() != s3.next_u64());
}

TEST_CASE("rng conversions") {
  Rng r(1, 2);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK_UNARY(u >= 0.0 && u < 1.0);
    const double z = r.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sumsq / n - 1.0) < 0.02);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("lhs stratification") {
  Rng r(7, 0);
  SUBCASE("n=4, d=1 lands one per quartile") {
    Matrix x = lhs(4, 1, r);
    std::vector<double> v(x.data().begin(), x.data().end());
    std::sort(v.begin(), v.end());
    for (int k = 0; k < 4; ++k) {
      CHECK(v[k] >= k / 4.0);
      CHECK(v[k] < (k + 1) / 4.0);
    }
  }
  SUBCASE("every dimension, many sizes") {
    for (std::size_t n = 1; n <= 40; n += 3)
      for (std::size_t d = 1; d <= 5; ++d) CHECK(strata_ok(lhs(n, d, r)));
  }
}

TEST_CASE("lhs determinism") {
  Rng a(99, 3), b(99, 3);
  CHECK(lhs(5, 2, a) == lhs(5, 2, b));
}

TEST_CASE("lhs marginal is uniform") {
  Rng r(2024, 0);
  std::vector<int> bins(10, 0);
  const int draws = 1000;
  for (int i = 0; i < draws; ++i) {
    const Matrix x = lhs(3, 2, r);
    ++bins[static_cast<std::size_t>(x(0, 1) * 10.0)];
  }
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - 100.0) * (b - 100.0) / 100.0;
  // upper 0.001 point of chi-square with 9 degrees of freedom
  CHECK(chi2 < 27.877);
}

TEST_CASE("initial design size") {
  CHECK(init_size(1) == 10);
  CHECK(init_size(2) == 15);
  CHECK(init_size(4) == 25);
  CHECK(default_candidate_count(2) == 1024);
}

TEST_CASE("candidate sets") {
  Rng r(5, 0);
  const Matrix plain = candidates(64, 3, std::nullopt, r);
  CHECK(plain.rows() == 64);
  const std::vector<double> inc{0.4, 0.5, 0.6};
  const Matrix with = candidates(64, 3, std::span<const double>(inc), r);
  CHECK(with.rows() == 84);
  for (double v : with.data()) CHECK_UNARY(v >= 0.0 && v <= 1.0);
  Rng a(5, 1), b(5, 1);
  CHECK(candidates(32, 2, std::span<const double>(inc.data(), 2), a) ==
        candidates(32, 2, std::span<const double>(inc.data(), 2), b));
}

TEST_CASE("candidate perturbations are clamped and deduplicated at a corner") {
  Rng r(8, 0);
  const std::vector<double> corner{0.0, 1.0};
  const Matrix c = candidates(16, 2, std::span<const double>(corner), r);
  CHECK(c.rows() <= 36);
  std::set<std::pair<double, double>> seen;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    CHECK_UNARY(c(i, 0) >= 0.0 && c(i, 1) <= 1.0);
    CHECK(seen.insert({c(i, 0), c(i, 1)}).second);
  }
}
