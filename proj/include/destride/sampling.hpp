#pragma once

#include <cstddef>

#include "destride/tensor.hpp"

namespace destride {

/// Regular sub-sampling grid: every `stride`-th row starting at
/// `row_offset` crossed with every `stride`-th column starting at
/// `col_offset`. Offsets are 1-based and never exceed the stride, so the
/// `stride * stride` grids of one stride partition any matrix.
class SamplingSpec {
 public:
  /// Throws ArgumentError unless 1 <= row_offset, col_offset <= stride.
  SamplingSpec(std::size_t row_offset, std::size_t col_offset, std::size_t stride);

  static SamplingSpec identity() { return {1, 1, 1}; }

  std::size_t row_offset() const noexcept { return row_offset_; }
  std::size_t col_offset() const noexcept { return col_offset_; }
  std::size_t stride() const noexcept { return stride_; }

  friend bool operator==(const SamplingSpec&, const SamplingSpec&) = default;

 private:
  std::size_t row_offset_;
  std::size_t col_offset_;
  std::size_t stride_;
};

/// Number of grid points with the given 1-based offset and stride along an
/// axis of `extent` elements; zero when the offset lies past the end.
constexpr std::size_t sampled_extent(std::size_t extent, std::size_t offset, std::size_t stride) {
  return extent < offset ? 0 : (extent - offset) / stride + 1;
}

/// `result(i, j) = x((i-1)s + m, (j-1)s + n)`. Sample sizes differ between
/// grids when the extent is not a multiple of the stride. Throws ShapeError
/// if the grid selects nothing.
Matrix sample_matrix(const Matrix& x, const SamplingSpec& spec);

/// Applies the grid to the plane spanned by tensor dimensions
/// (`first_dim`, `second_dim`), which must be (1, 2) or (3, 4); other
/// dimension pairs throw ArgumentError.
Tensor4 sample_tensor(const Tensor4& t, int first_dim, int second_dim, const SamplingSpec& spec);

/// Prepends `top` zero rows and `left` zero columns.
///
///     zero_pad([[5]], 1, 1) == [[0, 0],
///                               [0, 5]]
///
/// Shifting a filter down/right this way moves the sampling grid that
/// starts at (m, n) onto the grid that starts at (1, 1).
Matrix zero_pad(const Matrix& h, std::size_t top, std::size_t left);

/// The single grid equal to sampling with `(1, 1, inner_stride)` and then
/// with `outer`: offsets `(m-1) * inner_stride + 1`, stride `s * inner_stride`.
SamplingSpec compose_sampling(const SamplingSpec& outer, std::size_t inner_stride);

/// True iff the `s * s` grids of stride `s` claim every cell of a
/// rows x cols index set exactly once. Enumerates grid points directly.
bool partition_cover_check(std::size_t rows, std::size_t cols, std::size_t s);

}  // namespace destride
