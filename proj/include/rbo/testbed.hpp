#pragma once

// Benchmark objectives on the coded cube [0,1]^d, the brute-force adversary
// g(x, alpha) and grid-oracle robust minimizers.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rbo/linalg.hpp"

namespace rbo {

using Evaluator = std::function<double(std::span<const double>)>;

struct ObjectiveSpec {
  std::string name;
  std::string variant;
  std::size_t dim = 0;
  Evaluator eval;
  /// Known global minimizer in coded units; empty when unknown.
  std::vector<double> xstar;

  /// Checks the domain, then evaluates.
  double operator()(std::span<const double> u) const;
  std::string label() const;
};

// --- closed-form test functions -------------------------------------------

/// Three-branch 1d function with a wide shallow trough near 0.15 and a
/// narrower one at 0.55 whose walls have slope `slope` inside a log.
double ryan1d(double x, double slope = 2.0);
inline constexpr double kRyanSharpSlope = 20.0;

/// Bertsimas polynomial on raw inputs, maximized at (2.8, 4.0).
double bertsimas_raw(double x1, double x2);
/// Its negation on coded inputs, decoded to x1 in [-0.95, 3.2], x2 in [-0.45, 4.4].
double bertsimas2d(std::span<const double> u);

enum class RosenbrockVariant { paper, classic };
/// sum 100 (x_{i+1} - x_i)^2 + (x_i - 1)^2 for `paper`; the classic form
/// squares x_i inside the first term. Coded inputs decode to [-2.48, 2.48]^d.
double rosenbrock(std::span<const double> u, RosenbrockVariant variant);
double rosenbrock_raw(std::span<const double> x, RosenbrockVariant variant);

struct AffineBox {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> decode(std::span<const double> u) const;
  std::vector<double> encode(std::span<const double> x) const;
};
const AffineBox& bertsimas_box();
AffineBox rosenbrock_box(std::size_t d);

// --- registry ------------------------------------------------------------

/// Builds a named objective. Names: ryan1d (variants default|sharp; the
/// alias ryan-sharp selects sharp), bertsimas2d, rosenbrock (variants
/// paper|classic, any d >= 2).
ObjectiveSpec make_objective(const std::string& name, const std::string& variant = "", std::size_t d = 0);

/// One line per available objective and variant.
std::vector<std::string> describe_objectives();

// --- external objectives -------------------------------------------------

/// Runs `command` through /bin/sh as a persistent child. Each evaluation
/// writes the d coded coordinates on one line and reads one real back.
/// Calls are serialized. Failures throw EvaluatorFailure.
ObjectiveSpec external_command(const std::string& command, std::size_t d);

/// Nearest-neighbour lookup in a table of rows (x_1..x_d, y).
ObjectiveSpec table_objective(Matrix x, std::vector<double> y);
/// Reads the table from CSV: d input columns then one output column. A
/// non-numeric first line is treated as a header.
ObjectiveSpec table_objective(const std::filesystem::path& csv, std::size_t d);

// --- adversary oracles ---------------------------------------------------

/// Default per-dimension spacing for the dense adversary grid.
double default_adversary_step(std::size_t d);
/// Default spacing of the robust-optimum grid over the whole cube.
double default_oracle_step(std::size_t d);

/// max of f over a grid on the clamped window prod_j [x_j +- alpha_j] with
/// spacing <= step; both window edges and x itself are on the grid.
double true_adversary(const ObjectiveSpec& f, std::span<const double> x, std::span<const double> alpha,
                      double step = 0.0);

struct OracleResult {
  std::vector<double> xr;
  double g_at_xr = 0.0;
  double grid_step = 0.0;
};

/// Grid argmin of the adversary over [0,1]^d. The cube is gridded at
/// spacing `step`, f tabulated once, and windowed maxima taken with a
/// separable sliding-max filter whose window holds the grid points inside
/// [x_j - alpha_j, x_j + alpha_j] clipped to the cube.
OracleResult robust_optimum(const ObjectiveSpec& f, std::span<const double> alpha, double step = 0.0);

}  // namespace rbo
