#pragma once

#include <cstddef>
#include <vector>

#include "rbo/gp.hpp"

namespace rbo {

inline constexpr double kSigmaFloor = 1e-12;

struct AcqValues {
  std::vector<double> values;
  std::size_t argbest = 0;
};

double normal_pdf(double z);
/// Standard normal CDF through erfc, accurate in both tails.
double normal_cdf(double z);

/// Closed-form expected improvement below `fmin` for one Gaussian.
/// Falls back to max(0, fmin - mu) when sd < kSigmaFloor.
double expected_improvement(double mu, double sd, double fmin);

/// EI over every query point; argbest is the first maximizer.
AcqValues ei(const PredictiveMoments& moments, double fmin);

/// Index of the smallest predictive mean, ties to the lowest index.
std::size_t ey_select(const PredictiveMoments& moments);

struct ConfidenceBounds {
  std::vector<double> lcb;
  std::vector<double> ucb;
};

/// mu -/+ 2 sd.
ConfidenceBounds bounds(const PredictiveMoments& moments);

/// First index of the maximum / minimum entry.
std::size_t argmax(const std::vector<double>& v);
std::size_t argmin(const std::vector<double>& v);

}  // namespace rbo
