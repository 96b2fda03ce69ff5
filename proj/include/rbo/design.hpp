#pragma once

// Seeded random streams, Latin hypercube designs and candidate sets.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "rbo/linalg.hpp"

namespace rbo {

/// Deterministic random stream keyed by (seed, stream). Uses the
/// standard-specified mt19937_64 engine and hand-rolled conversions so the
/// sequence is identical across standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Independent child stream derived from this stream's key and a label.
  Rng substream(std::string_view label) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

std::uint64_t mix64(std::uint64_t x);

/// n points in [0,1)^d, one per stratum [k/n, (k+1)/n) in every coordinate.
Matrix lhs(std::size_t n, std::size_t d, Rng& rng);

/// Initial design size 5 + 5d.
std::size_t init_size(std::size_t d);

inline constexpr std::size_t kIncumbentPerturbations = 20;
inline constexpr double kIncumbentSd = 0.05;

/// Fresh LHS of n_cand rows, plus Gaussian perturbations of the incumbent
/// (clamped to the cube) when one is given. Rows closer than 1e-12 to an
/// earlier row are dropped.
Matrix candidates(std::size_t n_cand, std::size_t d, std::optional<std::span<const double>> incumbent,
                  Rng& rng);

/// Default candidate count 512 * d.
std::size_t default_candidate_count(std::size_t d);

}  // namespace rbo
