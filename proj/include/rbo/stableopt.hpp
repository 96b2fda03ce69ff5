#pragma once

// Confidence-bound min-max acquisition (StableOPT) on a candidate set, with
// the inner maximization over the same cornering grid REI uses.

#include <span>
#include <vector>

#include "rbo/gp.hpp"
#include "rbo/robust.hpp"

namespace rbo {

struct StableAcquisition {
  std::vector<double> x_tilde;  // believed robust location
  std::vector<double> a;        // effective (post-clamp) perturbation
  std::vector<double> x_eval;   // x_tilde + a, inside the cube
  std::size_t candidate_index = 0;
  double windowed_lcb = 0.0;  // max of lcb over the window of x_tilde
  double ucb_at_eval = 0.0;
};

/// x_tilde minimizes the window-max of lcb over the candidates; the
/// evaluation point maximizes ucb over x_tilde's window. Window points that
/// duplicate a design row are inadmissible for evaluation; a candidate whose
/// window holds no admissible point is skipped.
StableAcquisition stable_acquire(const Dataset& d, const SurrogateSettings& s, std::span<const double> alpha,
                                 const Matrix& candidates);
StableAcquisition stable_acquire(const GpModel& m, const SurrogateSettings& s, std::span<const double> alpha,
                                 const Matrix& candidates);

/// Reports on the points actually sampled, via the post hoc adversary.
BearSummary stable_report(const Dataset& d, const SurrogateSettings& s, std::span<const double> alpha);

}  // namespace rbo
