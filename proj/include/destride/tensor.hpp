#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace destride {

/// Dense real matrix, row-major storage.
///
/// Element access is 1-based: `m(1, 1)` is the top-left entry. The raw
/// buffer returned by `values()` is ordinary 0-based row-major storage.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  /// Builds a matrix from nested row lists, e.g. `Matrix::from_rows({{1, 2}, {3, 4}})`.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  // Unchecked 1-based access.
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[(i - 1) * cols_ + (j - 1)];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[(i - 1) * cols_ + (j - 1)];
  }

  // Checked 1-based access; throws IndexError.
  double at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

using Shape4 = std::array<std::size_t, 4>;

/// Inclusive 1-based index range `[first, last]` along one tensor dimension.
struct Range {
  std::size_t first;
  std::size_t last;
};

/// Dense real 4-way array. Dimension 1 is outermost in storage.
class Tensor4 {
 public:
  explicit Tensor4(Shape4 dims);
  Tensor4(Shape4 dims, std::vector<double> values);

  const Shape4& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis - 1); }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const noexcept {
    return data_[offset(i, j, k, l)];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) noexcept {
    return data_[offset(i, j, k, l)];
  }

  double at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;
  void set(std::size_t i, std::size_t j, std::size_t k, std::size_t l, double value);

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const Tensor4&, const Tensor4&) = default;

 private:
  std::size_t offset(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const noexcept {
    return (((i - 1) * dims_[1] + (j - 1)) * dims_[2] + (k - 1)) * dims_[3] + (l - 1);
  }
  void check_index(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;

  Shape4 dims_;
  std::vector<double> data_;
};

/// Contracts `h` (d1 x d2 x d3 x d4) against `x` (d3 x d4) over its last two
/// dimensions: `result(i, j) = sum_k sum_l h(i, j, k, l) * x(k, l)`.
///
/// Tensor dimension 3 runs over the rows of `x` and dimension 4 over its
/// columns, the same orientation the convolutional tensor uses for its
/// placement `t(i, j, i:i+a-1, j:j+b-1) = h`. Throws ShapeError unless
/// `h.dim(3) == x.rows()` and `h.dim(4) == x.cols()`.
Matrix tensor_product(const Tensor4& h, const Matrix& x);

/// Copies the contiguous block selected by `ranges`. Throws IndexError.
Tensor4 slice_region(const Tensor4& t, const std::array<Range, 4>& ranges);

std::string shape_string(const Matrix& m);
std::string shape_string(const Shape4& dims);

}  // namespace destride
