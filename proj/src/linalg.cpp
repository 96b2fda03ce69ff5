#include "rbo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbo/errors.hpp"

namespace rbo {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

void Matrix::append_row(std::span<const double> r) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = r.size();
  } else if (r.size() != cols_) {
    throw DimensionMismatch("row of length " + std::to_string(r.size()) +
                            " appended to matrix with " + std::to_string(cols_) + " columns");
  }
  data_.insert(data_.end(), r.begin(), r.end());
  ++rows_;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw DimensionMismatch("matrix product shape mismatch");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

std::vector<double> Matrix::operator*(std::span<const double> v) const {
  if (cols_ != v.size()) throw DimensionMismatch("matrix-vector shape mismatch");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

CholFactor cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw DimensionMismatch("cholesky needs a non-empty square matrix");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    const auto lj = l.row(j);
    for (std::size_t k = 0; k < j; ++k) pivot -= lj[k] * lj[k];
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw NotPositiveDefinite("non-positive pivot " + std::to_string(pivot) + " at column " +
                                std::to_string(j));
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto li = l.row(i);
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      l(i, j) = s / ljj;
    }
  }
  return CholFactor(std::move(l));
}

void forward_substitute(const CholFactor& f, std::span<double> b) {
  const Matrix& l = f.lower();
  const std::size_t n = l.rows();
  if (b.size() != n) throw DimensionMismatch("forward_substitute: rhs length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = l.row(i);
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
    b[i] = s / li[i];
  }
}

void back_substitute(const CholFactor& f, std::span<double> y) {
  const Matrix& l = f.lower();
  const std::size_t n = l.rows();
  if (y.size() != n) throw DimensionMismatch("back_substitute: rhs length mismatch");
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * y[k];
    y[i] = s / l(i, i);
  }
}

std::vector<double> solve_spd(const CholFactor& f, std::span<const double> b) {
  if (b.size() != f.order()) {
    throw DimensionMismatch("solve_spd: rhs has length " + std::to_string(b.size()) +
                            ", factor has order " + std::to_string(f.order()));
  }
  std::vector<double> x(b.begin(), b.end());
  forward_substitute(f, x);
  back_substitute(f, x);
  return x;
}

double log_det(const CholFactor& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.order(); ++i) s += std::log(f.lower()(i, i));
  return 2.0 * s;
}

}  // namespace rbo
