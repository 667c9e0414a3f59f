#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dgc {

/// Dense row-major matrix of doubles. Used for node features (n x d),
/// classifier weights (d x C) and the small dense operators of the oracle.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using FeatureMatrix = Matrix;

double frobenius_norm(const Matrix& m);
/// ||a - b||_F; throws DimensionMismatch on shape mismatch.
double frobenius_distance(const Matrix& a, const Matrix& b);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& m);

Matrix transpose(const Matrix& m);
/// Plain triple-loop product; only used on small dense operands.
Matrix matmul(const Matrix& a, const Matrix& b);

}  // namespace dgc
