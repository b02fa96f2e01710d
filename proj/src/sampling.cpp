#include "destride/sampling.hpp"

#include <string>
#include <vector>

#include "destride/errors.hpp"

namespace destride {

SamplingSpec::SamplingSpec(std::size_t row_offset, std::size_t col_offset, std::size_t stride)
    : row_offset_(row_offset), col_offset_(col_offset), stride_(stride) {
  if (stride < 1 || row_offset < 1 || col_offset < 1 || row_offset > stride || col_offset > stride) {
    throw ArgumentError("invalid sampling spec (" + std::to_string(row_offset) + "," +
                        std::to_string(col_offset) + "," + std::to_string(stride) +
                        "): offsets must lie in 1..stride");
  }
}

Matrix sample_matrix(const Matrix& x, const SamplingSpec& spec) {
  const std::size_t s = spec.stride();
  const std::size_t rows = sampled_extent(x.rows(), spec.row_offset(), s);
  const std::size_t cols = sampled_extent(x.cols(), spec.col_offset(), s);
  if (rows == 0 || cols == 0) {
    throw ShapeError("sampling grid (" + std::to_string(spec.row_offset()) + "," +
                     std::to_string(spec.col_offset()) + "," + std::to_string(s) +
                     ") selects nothing from a " + shape_string(x) + " matrix");
  }
  Matrix out(rows, cols);
  for (std::size_t i = 1; i <= rows; ++i)
    for (std::size_t j = 1; j <= cols; ++j)
      out(i, j) = x((i - 1) * s + spec.row_offset(), (j - 1) * s + spec.col_offset());
  return out;
}

Tensor4 sample_tensor(const Tensor4& t, int first_dim, int second_dim, const SamplingSpec& spec) {
  const bool outer = first_dim == 1 && second_dim == 2;
  const bool inner = first_dim == 3 && second_dim == 4;
  if (!outer && !inner) {
    throw ArgumentError("sample_tensor supports dimension pairs (1,2) and (3,4), got (" +
                        std::to_string(first_dim) + "," + std::to_string(second_dim) + ")");
  }
  const std::size_t s = spec.stride();
  const std::size_t a = outer ? 0 : 2;
  Shape4 dims = t.dims();
  dims[a] = sampled_extent(dims[a], spec.row_offset(), s);
  dims[a + 1] = sampled_extent(dims[a + 1], spec.col_offset(), s);
  if (dims[a] == 0 || dims[a + 1] == 0) {
    throw ShapeError("sampling grid selects nothing from tensor " + shape_string(t.dims()));
  }

  auto src = [&](std::size_t idx, std::size_t axis) -> std::size_t {
    if (axis == a) return (idx - 1) * s + spec.row_offset();
    if (axis == a + 1) return (idx - 1) * s + spec.col_offset();
    return idx;
  };

  Tensor4 out(dims);
  for (std::size_t i = 1; i <= dims[0]; ++i)
    for (std::size_t j = 1; j <= dims[1]; ++j)
      for (std::size_t k = 1; k <= dims[2]; ++k)
        for (std::size_t l = 1; l <= dims[3]; ++l)
          out(i, j, k, l) = t(src(i, 0), src(j, 1), src(k, 2), src(l, 3));
  return out;
}

Matrix zero_pad(const Matrix& h, std::size_t top, std::size_t left) {
  Matrix out(h.rows() + top, h.cols() + left);
  for (std::size_t i = 1; i <= h.rows(); ++i)
    for (std::size_t j = 1; j <= h.cols(); ++j) out(i + top, j + left) = h(i, j);
  return out;
}

SamplingSpec compose_sampling(const SamplingSpec& outer, std::size_t inner_stride) {
  if (inner_stride < 1) throw ArgumentError("inner stride must be positive");
  return SamplingSpec((outer.row_offset() - 1) * inner_stride + 1,
                      (outer.col_offset() - 1) * inner_stride + 1, outer.stride() * inner_stride);
}

bool partition_cover_check(std::size_t rows, std::size_t cols, std::size_t s) {
  if (s < 1) return false;
  std::vector<unsigned> claims(rows * cols, 0);
  for (std::size_t p = 1; p <= s; ++p)
    for (std::size_t q = 1; q <= s; ++q)
      for (std::size_t r = p; r <= rows; r += s)
        for (std::size_t c = q; c <= cols; c += s) ++claims[(r - 1) * cols + (c - 1)];
  for (auto n : claims) {
    if (n != 1) return false;
  }
  return true;
}

}  // namespace destride
