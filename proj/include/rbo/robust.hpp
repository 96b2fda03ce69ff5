#pragma once

// Adversarial surrogates and robust expected improvement.
//
// A fitted surrogate of f is "cornered": each design point's response is
// replaced by the largest predictive mean over a small grid spanning its
// alpha-box. A second GP fit to those adversarial responses stands in for
// the adversary g(x, alpha) = max over the box of f, and EI under that
// second GP, thresholded at the smallest adversarial response (the BEAR),
// drives robust acquisitions.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rbo/acquire.hpp"
#include "rbo/design.hpp"
#include "rbo/gp.hpp"

namespace rbo {

enum class AlphaMode { known, rand, sum };

const char* to_string(AlphaMode m);
AlphaMode parse_alpha_mode(std::string_view s);

struct AlphaSpec {
  AlphaMode mode = AlphaMode::known;
  /// Per-dimension half-widths used by known mode and for reporting.
  std::vector<double> alpha;
  /// Per-dimension upper limits for rand/sum modes.
  std::vector<double> alpha_max;
  /// Integration nodes for sum mode, spread evenly over [0, alpha_max].
  std::size_t nodes = 5;
  /// Interior grid points per dimension in the cornering grid (0 or odd).
  std::size_t intermediate = 0;

  /// Throws ConfigError when the fields are inconsistent for `mode`.
  void validate(std::size_t d) const;
};

/// 0 for d <= 2, otherwise 3.
std::size_t default_intermediate(std::size_t d);

/// Broadcasts a one-element vector to d entries; leaves d-vectors alone.
std::vector<double> broadcast(std::span<const double> v, std::size_t d);

struct SurrogateSettings {
  double theta = 1.0;
  /// Lengthscale of the adversarial surrogate; defaults to theta.
  std::optional<double> theta_adv;
  double eps = kDefaultJitter;
  std::size_t intermediate = 0;

  double adversarial_theta() const { return theta_adv.value_or(theta); }
};

/// Outer product of (intermediate + 2) evenly spaced values spanning
/// [x_j - alpha_j, x_j + alpha_j] per dimension; a zero half-width
/// contributes x_j alone. With `clamp`, coordinates are clipped to [0,1]
/// and repeats within a dimension removed.
Matrix corner_grid(std::span<const double> x, std::span<const double> alpha, std::size_t intermediate,
                   bool clamp = true);

struct AdversarialData {
  Matrix x;
  std::vector<double> y_alpha;
  std::vector<double> alpha_used;
};

/// y_i^alpha = max of the predictive mean over corner_grid(x_i, alpha).
AdversarialData adversarial_responses(const GpModel& m, std::span<const double> alpha,
                                      std::size_t intermediate);

/// Fresh GP on (X, Y^alpha) with its own scale estimate.
GpModel fit_adversarial(const AdversarialData& adv, double theta_adv, double eps = kDefaultJitter);

struct BearSummary {
  std::vector<double> x_bear;
  double f_bear = 0.0;
  std::size_t index = 0;
};

/// Row with the smallest adversarial response, ties to the lowest index.
BearSummary bear(const AdversarialData& adv);

/// Both surrogates of the robust pipeline for one alpha.
struct AdversarialSurrogate {
  AdversarialData adv;
  GpModel model;
  BearSummary best;
};

AdversarialSurrogate adversarial_surrogate(const GpModel& base, std::span<const double> alpha,
                                           const SurrogateSettings& s);

/// Robust EI at each candidate: fit f_n, corner it, fit the adversarial GP,
/// and take EI below the BEAR.
AcqValues rei(const Matrix& candidates, const Dataset& d, const SurrogateSettings& s,
              std::span<const double> alpha);
/// Same, reusing an already fitted surrogate of f.
AcqValues rei(const Matrix& candidates, const GpModel& base, const SurrogateSettings& s,
              std::span<const double> alpha);

/// The alpha nodes sum mode averages over: t / (T - 1) * alpha_max.
std::vector<std::vector<double>> sum_nodes(std::span<const double> alpha_max, std::size_t nodes);

/// REI averaged over unknown alpha. Sum mode averages the REI at evenly
/// spaced nodes; rand mode evaluates REI at one alpha drawn uniformly from
/// [0, alpha_max] (per dimension) using `rng`.
AcqValues averaged_rei(const Matrix& candidates, const Dataset& d, const SurrogateSettings& s,
                       const AlphaSpec& spec, Rng& rng);
AcqValues averaged_rei(const Matrix& candidates, const GpModel& base, const SurrogateSettings& s,
                       const AlphaSpec& spec, Rng& rng);

/// BEAR of an adversarial surrogate fit after the fact to any campaign's data.
BearSummary post_hoc(const Dataset& d, const SurrogateSettings& s, std::span<const double> alpha);

}  // namespace rbo
