#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "destride/tensor.hpp"

namespace destride {

/// Bank of 2-D filters indexed (out channel, in channel, row, col), all 1-based.
class Filter {
 public:
  Filter(std::size_t channels_out, std::size_t channels_in, std::size_t rows, std::size_t cols);
  Filter(std::size_t channels_out, std::size_t channels_in, std::size_t rows, std::size_t cols,
         std::vector<double> weights);

  std::size_t channels_out() const noexcept { return out_; }
  std::size_t channels_in() const noexcept { return in_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t o, std::size_t i, std::size_t r, std::size_t c) const noexcept {
    return data_[offset(o, i, r, c)];
  }
  double& operator()(std::size_t o, std::size_t i, std::size_t r, std::size_t c) noexcept {
    return data_[offset(o, i, r, c)];
  }
  double at(std::size_t o, std::size_t i, std::size_t r, std::size_t c) const;

  /// The single-channel filter connecting input `in` to output `out`.
  Matrix slice(std::size_t out, std::size_t in) const;
  void set_slice(std::size_t out, std::size_t in, const Matrix& h);

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const Filter&, const Filter&) = default;

 private:
  std::size_t offset(std::size_t o, std::size_t i, std::size_t r, std::size_t c) const noexcept {
    return (((o - 1) * in_ + (i - 1)) * rows_ + (r - 1)) * cols_ + (c - 1);
  }

  std::size_t out_, in_, rows_, cols_;
  std::vector<double> data_;
};

struct MapShape {
  std::size_t channels;
  std::size_t height;
  std::size_t width;

  std::size_t volume() const noexcept { return channels * height * width; }
  friend bool operator==(const MapShape&, const MapShape&) = default;
};

std::string shape_string(const MapShape& s);

/// Multi-channel image indexed (channel, row, col), all 1-based.
class FeatureMap {
 public:
  explicit FeatureMap(MapShape shape);
  FeatureMap(MapShape shape, std::vector<double> values);

  const MapShape& shape() const noexcept { return shape_; }
  std::size_t channels() const noexcept { return shape_.channels; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }

  double operator()(std::size_t c, std::size_t i, std::size_t j) const noexcept {
    return data_[((c - 1) * shape_.height + (i - 1)) * shape_.width + (j - 1)];
  }
  double& operator()(std::size_t c, std::size_t i, std::size_t j) noexcept {
    return data_[((c - 1) * shape_.height + (i - 1)) * shape_.width + (j - 1)];
  }
  double at(std::size_t c, std::size_t i, std::size_t j) const;

  Matrix channel(std::size_t c) const;
  void set_channel(std::size_t c, const Matrix& m);

  /// Channel-major storage: channel, then row, then column.
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  MapShape shape_;
  std::vector<double> data_;
};

/// Valid-mode cross-correlation (no kernel flip):
/// `out(i, j) = sum_{u,v} h(u, v) * x(i+u-1, j+v-1)`.
Matrix conv2d(const Matrix& h, const Matrix& x);

/// Cross-correlation evaluated only at every `stride`-th placement, i.e. the
/// (1, 1, stride) sample of `conv2d(h, x)`.
Matrix conv2d_strided(const Matrix& h, const Matrix& x, std::size_t stride);

/// `out[c] = sum_k conv2d_strided(h[c, k], x[k], stride)`.
FeatureMap conv_multichannel(const Filter& h, const FeatureMap& x, std::size_t stride);

/// Output extent of a valid strided correlation; throws ShapeError when the
/// kernel does not fit.
std::size_t strided_output_extent(std::size_t input, std::size_t kernel, std::size_t stride);

/// Convolutional tensor of `h` for an image of `image_rows` x `image_cols`:
/// shape (R-a+1) x (C-b+1) x R x C with `t(i, j, i:i+a-1, j:j+b-1) = h` and
/// zeros elsewhere, so that `tensor_product(t, x) == conv2d(h, x)`.
Tensor4 build_conv_tensor(const Matrix& h, std::size_t image_rows, std::size_t image_cols);

/// Exact check of the shift structure
/// `t(i, j, k, l) == t(i+1, j, k+1, l) == t(i, j+1, k, l+1)` at every index
/// where both sides exist.
bool is_conv_tensor(const Tensor4& t);

/// Generating filter of a convolutional tensor: the top-left bounding box of
/// the nonzeros of `t(1, 1, :, :)`. An all-zero slice yields a 1x1 zero
/// filter. Throws ArgumentError if `t` lacks the shift structure.
Matrix extract_filter(const Tensor4& t);

}  // namespace destride
