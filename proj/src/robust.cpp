#include "rbo/robust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbo/errors.hpp"

namespace rbo {

const char* to_string(AlphaMode m) {
  switch (m) {
    case AlphaMode::known: return "known";
    case AlphaMode::rand: return "rand";
    case AlphaMode::sum: return "sum";
  }
  return "?";
}

AlphaMode parse_alpha_mode(std::string_view s) {
  if (s == "known") return AlphaMode::known;
  if (s == "rand") return AlphaMode::rand;
  if (s == "sum") return AlphaMode::sum;
  throw ConfigError("unknown alpha mode '" + std::string(s) + "'");
}

std::size_t default_intermediate(std::size_t d) { return d <= 2 ? 0 : 3; }

std::vector<double> broadcast(std::span<const double> v, std::size_t d) {
  if (v.size() == d) return {v.begin(), v.end()};
  if (v.size() == 1) return std::vector<double>(d, v[0]);
  throw ConfigError("alpha has " + std::to_string(v.size()) + " entries for a " + std::to_string(d) +
                    "-dimensional problem");
}

void AlphaSpec::validate(std::size_t d) const {
  auto check_range = [&](const std::vector<double>& v, const char* what) {
    if (v.size() != d && v.size() != 1) {
      throw ConfigError(std::string(what) + " must have 1 or " + std::to_string(d) + " entries");
    }
    for (double a : v)
      if (!(a >= 0.0 && a <= 0.5)) throw ConfigError(std::string(what) + " entries must lie in [0, 0.5]");
  };
  if (mode == AlphaMode::known || !alpha.empty()) check_range(alpha, "alpha");
  if (mode != AlphaMode::known) {
    check_range(alpha_max, "alpha_max");
    if (std::none_of(alpha_max.begin(), alpha_max.end(), [](double a) { return a > 0.0; })) {
      throw ConfigError("rand/sum modes need alpha_max > 0");
    }
    if (mode == AlphaMode::sum && nodes < 2) throw ConfigError("sum mode needs at least 2 nodes");
  }
  if (intermediate != 0 && intermediate % 2 == 0) throw ConfigError("intermediate must be 0 or odd");
}

Matrix corner_grid(std::span<const double> x, std::span<const double> alpha, std::size_t intermediate,
                   bool clamp) {
  const std::size_t d = x.size();
  if (alpha.size() != d) throw DimensionMismatch("corner_grid: alpha and x differ in length");
  std::vector<std::vector<double>> axes(d);
  const std::size_t per_dim = intermediate + 2;
  for (std::size_t j = 0; j < d; ++j) {
    if (alpha[j] == 0.0) {
      axes[j] = {x[j]};
      continue;
    }
    const double lo = x[j] - alpha[j];
    const double step = 2.0 * alpha[j] / static_cast<double>(per_dim - 1);
    for (std::size_t k = 0; k < per_dim; ++k) {
      // Pin the last node to the exact upper edge.
      double v = (k + 1 == per_dim) ? x[j] + alpha[j] : lo + step * static_cast<double>(k);
      if (clamp) v = std::clamp(v, 0.0, 1.0);
      if (clamp && !axes[j].empty() && axes[j].back() == v) continue;
      axes[j].push_back(v);
    }
  }
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  Matrix grid(total, d);
  for (std::size_t r = 0; r < total; ++r) {
    std::size_t rem = r;
    for (std::size_t j = d; j-- > 0;) {
      grid(r, j) = axes[j][rem % axes[j].size()];
      rem /= axes[j].size();
    }
  }
  return grid;
}

AdversarialData adversarial_responses(const GpModel& m, std::span<const double> alpha,
                                      std::size_t intermediate) {
  const Matrix& x = m.data().inputs();
  const std::size_t n = x.rows();
  Matrix all;
  std::vector<std::size_t> offsets{0};
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix g = corner_grid(x.row(i), alpha, intermediate, true);
    for (std::size_t r = 0; r < g.rows(); ++r) all.append_row(g.row(r));
    offsets.push_back(all.rows());
  }
  const std::vector<double> mu = predict_mean(m, all);
  AdversarialData adv{x, std::vector<double>(n), {alpha.begin(), alpha.end()}};
  for (std::size_t i = 0; i < n; ++i)
    adv.y_alpha[i] = *std::max_element(mu.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
                                       mu.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]));
  return adv;
}

GpModel fit_adversarial(const AdversarialData& adv, double theta_adv, double eps) {
  return fit(Dataset(adv.x, adv.y_alpha), theta_adv, eps);
}

BearSummary bear(const AdversarialData& adv) {
  const std::size_t i = argmin(adv.y_alpha);
  const auto row = adv.x.row(i);
  return {{row.begin(), row.end()}, adv.y_alpha[i], i};
}

AdversarialSurrogate adversarial_surrogate(const GpModel& base, std::span<const double> alpha,
                                           const SurrogateSettings& s) {
  AdversarialData adv = adversarial_responses(base, alpha, s.intermediate);
  GpModel model = fit_adversarial(adv, s.adversarial_theta(), s.eps);
  BearSummary best = bear(adv);
  return {std::move(adv), std::move(model), std::move(best)};
}

AcqValues rei(const Matrix& candidates, const GpModel& base, const SurrogateSettings& s,
              std::span<const double> alpha) {
  const AdversarialSurrogate sur = adversarial_surrogate(base, alpha, s);
  return ei(predict(sur.model, candidates), sur.best.f_bear);
}

AcqValues rei(const Matrix& candidates, const Dataset& d, const SurrogateSettings& s,
              std::span<const double> alpha) {
  return rei(candidates, fit(d, s.theta, s.eps), s, alpha);
}

std::vector<std::vector<double>> sum_nodes(std::span<const double> alpha_max, std::size_t nodes) {
  if (nodes == 0) throw std::invalid_argument("sum mode needs at least one node");
  std::vector<std::vector<double>> out;
  for (std::size_t t = 0; t < nodes; ++t) {
    const double frac = nodes == 1 ? 1.0 : static_cast<double>(t) / static_cast<double>(nodes - 1);
    std::vector<double> a(alpha_max.begin(), alpha_max.end());
    // The last node is alpha_max itself, bit for bit.
    if (t + 1 < nodes)
      for (double& v : a) v *= frac;
    out.push_back(std::move(a));
  }
  return out;
}

AcqValues averaged_rei(const Matrix& candidates, const GpModel& base, const SurrogateSettings& s,
                       const AlphaSpec& spec, Rng& rng) {
  const std::size_t d = base.data().dim();
  if (spec.mode == AlphaMode::known) return rei(candidates, base, s, broadcast(spec.alpha, d));
  const std::vector<double> amax = broadcast(spec.alpha_max, d);
  switch (spec.mode) {
    case AlphaMode::known:
      break;
    case AlphaMode::rand: {
      std::vector<double> a(d);
      for (std::size_t j = 0; j < d; ++j) a[j] = rng.uniform(0.0, amax[j]);
      return rei(candidates, base, s, a);
    }
    case AlphaMode::sum: {
      AcqValues out;
      out.values.assign(candidates.rows(), 0.0);
      const auto nodes = sum_nodes(amax, spec.nodes);
      for (const auto& a : nodes) {
        const AcqValues one = rei(candidates, base, s, a);
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += one.values[i];
      }
      for (double& v : out.values) v /= static_cast<double>(nodes.size());
      out.argbest = argmax(out.values);
      return out;
    }
  }
  throw std::logic_error("unhandled alpha mode");
}

AcqValues averaged_rei(const Matrix& candidates, const Dataset& d, const SurrogateSettings& s,
                       const AlphaSpec& spec, Rng& rng) {
  return averaged_rei(candidates, fit(d, s.theta, s.eps), s, spec, rng);
}

BearSummary post_hoc(const Dataset& d, const SurrogateSettings& s, std::span<const double> alpha) {
  return adversarial_surrogate(fit(d, s.theta, s.eps), alpha, s).best;
}

}  // namespace rbo
