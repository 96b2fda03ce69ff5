#include "rbo/design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rbo {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(phi);
  return r * std::cos(phi);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = 0;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

Rng Rng::substream(std::string_view label) const {
  // FNV-1a over the label.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return Rng(mix64(seed_ ^ h), mix64(stream_ + h));
}

Matrix lhs(std::size_t n, std::size_t d, Rng& rng) {
  if (n == 0 || d == 0) throw std::invalid_argument("lhs needs n >= 1 and d >= 1");
  Matrix x(n, d);
  std::vector<std::size_t> perm(n);
  const double width = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = (static_cast<double>(perm[i]) + rng.uniform()) * width;
      // Rounding can push the top of a stratum onto its upper edge.
      x(i, j) = std::min(v, std::nextafter((static_cast<double>(perm[i]) + 1.0) * width, 0.0));
    }
  }
  return x;
}

std::size_t init_size(std::size_t d) { return 5 + 5 * d; }

std::size_t default_candidate_count(std::size_t d) { return 512 * d; }

Matrix candidates(std::size_t n_cand, std::size_t d, std::optional<std::span<const double>> incumbent,
                  Rng& rng) {
  if (n_cand == 0) throw std::invalid_argument("candidate count must be positive");
  Matrix out = lhs(n_cand, d, rng);
  if (!incumbent) return out;
  if (incumbent->size() != d) throw std::invalid_argument("incumbent dimension mismatch");
  std::vector<double> p(d);
  for (std::size_t k = 0; k < kIncumbentPerturbations; ++k) {
    for (std::size_t j = 0; j < d; ++j)
      p[j] = std::clamp((*incumbent)[j] + kIncumbentSd * rng.normal(), 0.0, 1.0);
    bool dup = false;
    for (std::size_t r = 0; r < out.rows() && !dup; ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (out(r, j) - p[j]) * (out(r, j) - p[j]);
      dup = std::sqrt(s) <= 1e-12;
    }
    if (!dup) out.append_row(p);
  }
  return out;
}

}  // namespace rbo
