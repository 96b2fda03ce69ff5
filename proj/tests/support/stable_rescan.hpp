#pragma once

// Exhaustive re-scan of a StableOPT decision: every candidate and every
// window offset is evaluated one point at a time.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "rbo/acquire.hpp"
#include "rbo/robust.hpp"
#include "rbo/stableopt.hpp"

namespace suite {

struct RescanResult {
  bool x_tilde_optimal = true;
  bool a_optimal = true;
  bool a_in_window = true;
  bool x_eval_in_cube = true;
  double best_windowed_lcb = 0.0;
};

inline double point_bound(const rbo::GpModel& m, std::span<const double> p, double sign) {
  rbo::Matrix q(0, p.size());
  q.append_row(p);
  const rbo::PredictiveMoments pm = rbo::predict(m, q);
  return pm.mu[0] + sign * 2.0 * std::sqrt(pm.var[0]);
}

inline RescanResult rescan(const rbo::GpModel& m, const rbo::SurrogateSettings& s, std::span<const double> alpha,
                           const rbo::Matrix& cand, const rbo::StableAcquisition& got, double tol = 1e-12) {
  RescanResult out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cand.rows(); ++c) {
    const rbo::Matrix g = rbo::corner_grid(cand.row(c), alpha, s.intermediate, true);
    bool admissible = false;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < g.rows(); ++r) {
      worst = std::max(worst, point_bound(m, g.row(r), -1.0));
      admissible = admissible || !m.data().contains(g.row(r));
    }
    if (admissible) best = std::min(best, worst);
  }
  out.best_windowed_lcb = best;
  if (got.windowed_lcb > best + tol) out.x_tilde_optimal = false;

  const rbo::Matrix g = rbo::corner_grid(got.x_tilde, alpha, s.intermediate, true);
  const double chosen = point_bound(m, got.x_eval, +1.0);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    if (m.data().contains(g.row(r))) continue;
    if (point_bound(m, g.row(r), +1.0) > chosen + tol) out.a_optimal = false;
  }
  bool on_grid = false;
  for (std::size_t r = 0; r < g.rows() && !on_grid; ++r) {
    bool same = true;
    for (std::size_t j = 0; j < got.x_eval.size(); ++j) same = same && g(r, j) == got.x_eval[j];
    on_grid = same;
  }
  out.a_in_window = on_grid;
  for (std::size_t j = 0; j < got.a.size(); ++j) {
    if (std::abs(got.a[j]) > alpha[j] + 1e-15) out.a_in_window = false;
    if (!(got.x_eval[j] >= 0.0 && got.x_eval[j] <= 1.0)) out.x_eval_in_cube = false;
  }
  return out;
}

}  // namespace suite
