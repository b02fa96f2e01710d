#include "destride/conv.hpp"

#include <algorithm>
#include <string>

#include "destride/errors.hpp"

namespace destride {

Filter::Filter(std::size_t channels_out, std::size_t channels_in, std::size_t rows, std::size_t cols)
    : Filter(channels_out, channels_in, rows, cols,
             std::vector<double>(channels_out * channels_in * rows * cols)) {}

Filter::Filter(std::size_t channels_out, std::size_t channels_in, std::size_t rows, std::size_t cols,
               std::vector<double> weights)
    : out_(channels_out), in_(channels_in), rows_(rows), cols_(cols), data_(std::move(weights)) {
  if (out_ == 0 || in_ == 0 || rows_ == 0 || cols_ == 0) {
    throw ShapeError("filter dimensions must be positive");
  }
  if (data_.size() != out_ * in_ * rows_ * cols_) {
    throw ShapeError("filter " + std::to_string(out_) + "x" + std::to_string(in_) + "x" +
                     std::to_string(rows_) + "x" + std::to_string(cols_) + " needs " +
                     std::to_string(out_ * in_ * rows_ * cols_) + " weights, got " +
                     std::to_string(data_.size()));
  }
}

double Filter::at(std::size_t o, std::size_t i, std::size_t r, std::size_t c) const {
  if (o < 1 || o > out_ || i < 1 || i > in_ || r < 1 || r > rows_ || c < 1 || c > cols_) {
    throw IndexError("filter index (" + std::to_string(o) + "," + std::to_string(i) + "," +
                     std::to_string(r) + "," + std::to_string(c) + ") out of range");
  }
  return (*this)(o, i, r, c);
}

Matrix Filter::slice(std::size_t out, std::size_t in) const {
  at(out, in, 1, 1);
  Matrix m(rows_, cols_);
  for (std::size_t r = 1; r <= rows_; ++r)
    for (std::size_t c = 1; c <= cols_; ++c) m(r, c) = (*this)(out, in, r, c);
  return m;
}

void Filter::set_slice(std::size_t out, std::size_t in, const Matrix& h) {
  at(out, in, 1, 1);
  if (h.rows() != rows_ || h.cols() != cols_) {
    throw ShapeError("filter slice must be " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                     ", got " + shape_string(h));
  }
  for (std::size_t r = 1; r <= rows_; ++r)
    for (std::size_t c = 1; c <= cols_; ++c) (*this)(out, in, r, c) = h(r, c);
}

std::string shape_string(const MapShape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

FeatureMap::FeatureMap(MapShape shape) : FeatureMap(shape, std::vector<double>(shape.volume())) {}

FeatureMap::FeatureMap(MapShape shape, std::vector<double> values)
    : shape_(shape), data_(std::move(values)) {
  if (shape_.channels == 0 || shape_.height == 0 || shape_.width == 0) {
    throw ShapeError("feature map dimensions must be positive, got " + shape_string(shape_));
  }
  if (data_.size() != shape_.volume()) {
    throw ShapeError("feature map " + shape_string(shape_) + " needs " +
                     std::to_string(shape_.volume()) + " values, got " + std::to_string(data_.size()));
  }
}

double FeatureMap::at(std::size_t c, std::size_t i, std::size_t j) const {
  if (c < 1 || c > shape_.channels || i < 1 || i > shape_.height || j < 1 || j > shape_.width) {
    throw IndexError("feature map index (" + std::to_string(c) + "," + std::to_string(i) + "," +
                     std::to_string(j) + ") outside " + shape_string(shape_));
  }
  return (*this)(c, i, j);
}

Matrix FeatureMap::channel(std::size_t c) const {
  at(c, 1, 1);
  Matrix m(shape_.height, shape_.width);
  for (std::size_t i = 1; i <= shape_.height; ++i)
    for (std::size_t j = 1; j <= shape_.width; ++j) m(i, j) = (*this)(c, i, j);
  return m;
}

void FeatureMap::set_channel(std::size_t c, const Matrix& m) {
  at(c, 1, 1);
  if (m.rows() != shape_.height || m.cols() != shape_.width) {
    throw ShapeError("channel must be " + std::to_string(shape_.height) + "x" +
                     std::to_string(shape_.width) + ", got " + shape_string(m));
  }
  for (std::size_t i = 1; i <= shape_.height; ++i)
    for (std::size_t j = 1; j <= shape_.width; ++j) (*this)(c, i, j) = m(i, j);
}

std::size_t strided_output_extent(std::size_t input, std::size_t kernel, std::size_t stride) {
  if (stride < 1) throw ArgumentError("stride must be positive");
  if (kernel < 1 || kernel > input) {
    throw ShapeError("kernel extent " + std::to_string(kernel) + " does not fit input extent " +
                     std::to_string(input));
  }
  return (input - kernel) / stride + 1;
}

Matrix conv2d(const Matrix& h, const Matrix& x) { return conv2d_strided(h, x, 1); }

Matrix conv2d_strided(const Matrix& h, const Matrix& x, std::size_t stride) {
  if (h.rows() > x.rows() || h.cols() > x.cols()) {
    throw ShapeError("filter " + shape_string(h) + " larger than image " + shape_string(x));
  }
  const std::size_t rows = strided_output_extent(x.rows(), h.rows(), stride);
  const std::size_t cols = strided_output_extent(x.cols(), h.cols(), stride);
  Matrix out(rows, cols);
  for (std::size_t i = 1; i <= rows; ++i) {
    for (std::size_t j = 1; j <= cols; ++j) {
      const std::size_t r0 = (i - 1) * stride;
      const std::size_t c0 = (j - 1) * stride;
      double acc = 0.0;
      for (std::size_t u = 1; u <= h.rows(); ++u)
        for (std::size_t v = 1; v <= h.cols(); ++v) acc += h(u, v) * x(r0 + u, c0 + v);
      out(i, j) = acc;
    }
  }
  return out;
}

FeatureMap conv_multichannel(const Filter& h, const FeatureMap& x, std::size_t stride) {
  if (h.channels_in() != x.channels()) {
    throw ShapeError("filter expects " + std::to_string(h.channels_in()) + " input channels, map has " +
                     std::to_string(x.channels()));
  }
  if (h.rows() > x.height() || h.cols() > x.width()) {
    throw ShapeError("kernel " + std::to_string(h.rows()) + "x" + std::to_string(h.cols()) +
                     " larger than feature map " + shape_string(x.shape()));
  }
  const std::size_t rows = strided_output_extent(x.height(), h.rows(), stride);
  const std::size_t cols = strided_output_extent(x.width(), h.cols(), stride);
  FeatureMap out({h.channels_out(), rows, cols});

  const auto w = h.values();
  const auto in = x.values();
  auto dst = out.values();
  const std::size_t kh = h.rows(), kw = h.cols(), hh = x.height(), ww = x.width();
  for (std::size_t o = 0; o < h.channels_out(); ++o) {
    for (std::size_t k = 0; k < h.channels_in(); ++k) {
      const double* wk = w.data() + (o * h.channels_in() + k) * kh * kw;
      const double* xk = in.data() + k * hh * ww;
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
          double acc = 0.0;
          for (std::size_t u = 0; u < kh; ++u) {
            const double* xrow = xk + (i * stride + u) * ww + j * stride;
            const double* wrow = wk + u * kw;
            for (std::size_t v = 0; v < kw; ++v) acc += wrow[v] * xrow[v];
          }
          dst[(o * rows + i) * cols + j] += acc;
        }
      }
    }
  }
  return out;
}

Tensor4 build_conv_tensor(const Matrix& h, std::size_t image_rows, std::size_t image_cols) {
  if (h.rows() > image_rows || h.cols() > image_cols) {
    throw ShapeError("filter " + shape_string(h) + " larger than image " + std::to_string(image_rows) +
                     "x" + std::to_string(image_cols));
  }
  const std::size_t out_rows = image_rows - h.rows() + 1;
  const std::size_t out_cols = image_cols - h.cols() + 1;
  Tensor4 t({out_rows, out_cols, image_rows, image_cols});
  for (std::size_t i = 1; i <= out_rows; ++i)
    for (std::size_t j = 1; j <= out_cols; ++j)
      for (std::size_t u = 1; u <= h.rows(); ++u)
        for (std::size_t v = 1; v <= h.cols(); ++v) t(i, j, i + u - 1, j + v - 1) = h(u, v);
  return t;
}

bool is_conv_tensor(const Tensor4& t) {
  const auto& d = t.dims();
  for (std::size_t i = 1; i <= d[0]; ++i)
    for (std::size_t j = 1; j <= d[1]; ++j)
      for (std::size_t k = 1; k <= d[2]; ++k)
        for (std::size_t l = 1; l <= d[3]; ++l) {
          const double v = t(i, j, k, l);
          if (i < d[0] && k < d[2] && t(i + 1, j, k + 1, l) != v) return false;
          if (j < d[1] && l < d[3] && t(i, j + 1, k, l + 1) != v) return false;
        }
  return true;
}

Matrix extract_filter(const Tensor4& t) {
  if (!is_conv_tensor(t)) throw ArgumentError("extract_filter: tensor is not a convolutional tensor");
  const auto& d = t.dims();
  std::size_t last_row = 0, last_col = 0;
  for (std::size_t k = 1; k <= d[2]; ++k)
    for (std::size_t l = 1; l <= d[3]; ++l)
      if (t(1, 1, k, l) != 0.0) {
        last_row = std::max(last_row, k);
        last_col = std::max(last_col, l);
      }
  if (last_row == 0) return Matrix(1, 1);
  Matrix h(last_row, last_col);
  for (std::size_t k = 1; k <= last_row; ++k)
    for (std::size_t l = 1; l <= last_col; ++l) h(k, l) = t(1, 1, k, l);
  return h;
}

}  // namespace destride
