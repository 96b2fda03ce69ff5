#include "rbo/acquire.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rbo {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mu, double sd, double fmin) {
  const double gap = fmin - mu;
  if (!(sd >= kSigmaFloor)) return std::max(0.0, gap);
  const double z = gap / sd;
  return std::max(0.0, gap * normal_cdf(z) + sd * normal_pdf(z));
}

std::size_t argmax(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("argmax of empty vector");
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t argmin(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("argmin of empty vector");
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

AcqValues ei(const PredictiveMoments& moments, double fmin) {
  AcqValues out;
  out.values.resize(moments.size());
  for (std::size_t i = 0; i < moments.size(); ++i)
    out.values[i] = expected_improvement(moments.mu[i], moments.sd(i), fmin);
  out.argbest = argmax(out.values);
  return out;
}

std::size_t ey_select(const PredictiveMoments& moments) { return argmin(moments.mu); }

ConfidenceBounds bounds(const PredictiveMoments& moments) {
  ConfidenceBounds b;
  b.lcb.resize(moments.size());
  b.ucb.resize(moments.size());
  for (std::size_t i = 0; i < moments.size(); ++i) {
    const double half = 2.0 * moments.sd(i);
    b.lcb[i] = moments.mu[i] - half;
    b.ucb[i] = moments.mu[i] + half;
  }
  return b;
}

}  // namespace rbo
