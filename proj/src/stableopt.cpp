#include "rbo/stableopt.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "rbo/acquire.hpp"

namespace rbo {

StableAcquisition stable_acquire(const GpModel& m, const SurrogateSettings& s, std::span<const double> alpha,
                                 const Matrix& candidates) {
  const std::size_t nc = candidates.rows();
  Matrix windows;
  std::vector<std::size_t> offsets{0};
  for (std::size_t c = 0; c < nc; ++c) {
    const Matrix g = corner_grid(candidates.row(c), alpha, s.intermediate, true);
    for (std::size_t r = 0; r < g.rows(); ++r) windows.append_row(g.row(r));
    offsets.push_back(windows.rows());
  }
  const ConfidenceBounds cb = bounds(predict(m, windows));

  std::vector<bool> admissible(windows.rows());
  for (std::size_t r = 0; r < windows.rows(); ++r) admissible[r] = !m.data().contains(windows.row(r));

  std::size_t best_c = nc;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < nc; ++c) {
    bool any = false;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t r = offsets[c]; r < offsets[c + 1]; ++r) {
      worst = std::max(worst, cb.lcb[r]);
      any = any || admissible[r];
    }
    if (any && worst < best_val) {
      best_val = worst;
      best_c = c;
    }
  }
  if (best_c == nc) throw std::runtime_error("stable_acquire: no candidate window has an untried point");

  std::size_t best_r = offsets[best_c + 1];
  for (std::size_t r = offsets[best_c]; r < offsets[best_c + 1]; ++r)
    if (admissible[r] && (best_r == offsets[best_c + 1] || cb.ucb[r] > cb.ucb[best_r])) best_r = r;

  StableAcquisition out;
  const auto xt = candidates.row(best_c);
  const auto xe = windows.row(best_r);
  out.x_tilde.assign(xt.begin(), xt.end());
  out.x_eval.assign(xe.begin(), xe.end());
  out.a.resize(xt.size());
  for (std::size_t j = 0; j < xt.size(); ++j) out.a[j] = xe[j] - xt[j];
  out.candidate_index = best_c;
  out.windowed_lcb = best_val;
  out.ucb_at_eval = cb.ucb[best_r];
  return out;
}

StableAcquisition stable_acquire(const Dataset& d, const SurrogateSettings& s, std::span<const double> alpha,
                                 const Matrix& candidates) {
  return stable_acquire(fit(d, s.theta, s.eps), s, alpha, candidates);
}

BearSummary stable_report(const Dataset& d, const SurrogateSettings& s, std::span<const double> alpha) {
  return post_hoc(d, s, alpha);
}

}  // namespace rbo
