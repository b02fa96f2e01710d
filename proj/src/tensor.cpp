#include "destride/tensor.hpp"

#include <numeric>
#include <sstream>

#include "destride/errors.hpp"

namespace destride {

namespace {

std::size_t product(const Shape4& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : Matrix(rows, cols, std::vector<double>(rows * cols)) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                     std::to_string(rows * cols) + " values, got " + std::to_string(data_.size()));
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  if (rows.size() == 0) throw ShapeError("matrix needs at least one row");
  const std::size_t cols = rows.begin()->size();
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) throw ShapeError("ragged row list");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(rows.size(), cols, std::move(values));
}

double Matrix::at(std::size_t i, std::size_t j) const {
  if (i < 1 || i > rows_ || j < 1 || j > cols_) {
    throw IndexError("index (" + std::to_string(i) + "," + std::to_string(j) + ") outside " +
                     shape_string(*this) + " matrix");
  }
  return (*this)(i, j);
}

void Matrix::set(std::size_t i, std::size_t j, double value) {
  at(i, j);
  (*this)(i, j) = value;
}

Tensor4::Tensor4(Shape4 dims) : Tensor4(dims, std::vector<double>(product(dims))) {}

Tensor4::Tensor4(Shape4 dims, std::vector<double> values) : dims_(dims), data_(std::move(values)) {
  for (auto d : dims_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(dims_));
  }
  if (data_.size() != product(dims_)) {
    throw ShapeError("tensor " + shape_string(dims_) + " needs " + std::to_string(product(dims_)) +
                     " values, got " + std::to_string(data_.size()));
  }
}

void Tensor4::check_index(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
  const Shape4 idx{i, j, k, l};
  for (std::size_t a = 0; a < 4; ++a) {
    if (idx[a] < 1 || idx[a] > dims_[a]) {
      throw IndexError("index (" + std::to_string(i) + "," + std::to_string(j) + "," +
                       std::to_string(k) + "," + std::to_string(l) + ") outside " +
                       shape_string(dims_) + " tensor (dimension " + std::to_string(a + 1) + ")");
    }
  }
}

double Tensor4::at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
  check_index(i, j, k, l);
  return (*this)(i, j, k, l);
}

void Tensor4::set(std::size_t i, std::size_t j, std::size_t k, std::size_t l, double value) {
  check_index(i, j, k, l);
  (*this)(i, j, k, l) = value;
}

Matrix tensor_product(const Tensor4& h, const Matrix& x) {
  const auto& d = h.dims();
  if (d[2] != x.rows() || d[3] != x.cols()) {
    throw ShapeError("tensor_product: tensor " + shape_string(d) + " cannot contract matrix " +
                     shape_string(x) + " (needs " + std::to_string(d[2]) + "x" + std::to_string(d[3]) +
                     ")");
  }
  Matrix out(d[0], d[1]);
  for (std::size_t i = 1; i <= d[0]; ++i) {
    for (std::size_t j = 1; j <= d[1]; ++j) {
      double acc = 0.0;
      for (std::size_t k = 1; k <= d[2]; ++k) {
        for (std::size_t l = 1; l <= d[3]; ++l) acc += h(i, j, k, l) * x(k, l);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Tensor4 slice_region(const Tensor4& t, const std::array<Range, 4>& ranges) {
  Shape4 out_dims{};
  for (std::size_t a = 0; a < 4; ++a) {
    const auto [first, last] = ranges[a];
    if (first < 1 || last < first || last > t.dims()[a]) {
      throw IndexError("slice range " + std::to_string(first) + ":" + std::to_string(last) +
                       " invalid for dimension " + std::to_string(a + 1) + " of " +
                       shape_string(t.dims()));
    }
    out_dims[a] = last - first + 1;
  }
  Tensor4 out(out_dims);
  for (std::size_t i = 1; i <= out_dims[0]; ++i)
    for (std::size_t j = 1; j <= out_dims[1]; ++j)
      for (std::size_t k = 1; k <= out_dims[2]; ++k)
        for (std::size_t l = 1; l <= out_dims[3]; ++l)
          out(i, j, k, l) = t(i + ranges[0].first - 1, j + ranges[1].first - 1, k + ranges[2].first - 1,
                              l + ranges[3].first - 1);
  return out;
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

std::string shape_string(const Shape4& dims) {
  std::ostringstream os;
  os << dims[0] << "x" << dims[1] << "x" << dims[2] << "x" << dims[3];
  return os.str();
}

}  // namespace destride
