#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "cheblr/errors.hpp"

namespace cheblr {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Dimensions are at least 1x1 and every
/// entry supplied at construction must be finite.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Vector col(std::size_t j) const;
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transpose() const;
  /// Submatrix made of the given rows, in the given order.
  Matrix select_rows(std::span<const std::size_t> idx) const;

  /// Chebyshev norm: largest absolute entry.
  double max_abs() const noexcept;

  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

/// a * b^T without forming the transpose.
Matrix multiply_transposed(const Matrix& a, const Matrix& b);

/// Chebyshev norm of a - u v^T.
double residual_max_abs(const Matrix& a, const Matrix& u, const Matrix& v);

double max_abs(std::span<const double> x) noexcept;
double norm1(std::span<const double> x) noexcept;
double norm2(std::span<const double> x) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;

inline int sign_of(double x) noexcept { return (x > 0) - (x < 0); }

}  // namespace cheblr
