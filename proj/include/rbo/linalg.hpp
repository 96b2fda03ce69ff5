#pragma once

// Dense row-major matrices and the Cholesky machinery behind GP fitting.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rbo {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  void append_row(std::span<const double> r);

  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;
  std::vector<double> operator*(std::span<const double> v) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Max-row-sum norm.
double norm_inf(const Matrix& a);

/// Lower-triangular factor L with L * L^T equal to the source matrix.
class CholFactor {
 public:
  std::size_t order() const { return lower_.rows(); }
  const Matrix& lower() const { return lower_; }

 private:
  friend CholFactor cholesky(const Matrix& a);
  explicit CholFactor(Matrix lower) : lower_(std::move(lower)) {}
  Matrix lower_;
};

/// Throws NotPositiveDefinite on a non-positive pivot and DimensionMismatch
/// for non-square input. Only the lower triangle of `a` is read.
CholFactor cholesky(const Matrix& a);

/// Solves L y = b in place.
void forward_substitute(const CholFactor& f, std::span<double> b);
/// Solves L^T x = y in place.
void back_substitute(const CholFactor& f, std::span<double> y);

/// Solves A x = b where A = L L^T.
std::vector<double> solve_spd(const CholFactor& f, std::span<const double> b);

double log_det(const CholFactor& f);

}  // namespace rbo
