#include "doctest.h"

#include <random>

#include "destride/conv.hpp"
#include "destride/errors.hpp"

using namespace destride;

namespace {

Matrix row(std::initializer_list<double> v) { return Matrix(1, v.size(), std::vector<double>(v)); }

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = dist(rng);
  return m;
}

}  // namespace

TEST_SUITE("conv") {
  TEST_CASE("identity filter returns the image") {
    const Matrix x = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(conv2d(Matrix::from_rows({{1}}), x) == x);
  }

  TEST_CASE("one-dimensional sliding sum") {
    const Matrix h = row({1, 2, 3, 4});
    const Matrix x = row({1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(conv2d(h, x) == row({30, 40, 50, 60, 70}));
    CHECK(conv2d_strided(h, x, 2) == row({30, 50, 70}));
    CHECK(conv2d_strided(h, x, 1) == conv2d(h, x));
    CHECK(conv2d_strided(h, x, 5) == row({30}));
  }

  TEST_CASE("correlation does not flip the kernel") {
    CHECK(conv2d(Matrix::from_rows({{1, 0}, {0, 0}}), Matrix::from_rows({{1, 2}, {3, 4}})) ==
          Matrix::from_rows({{1}}));
  }

  TEST_CASE("kernel larger than image is a shape error") {
    CHECK_THROWS_AS(conv2d(Matrix(3, 3), Matrix(2, 5)), ShapeError);
    CHECK_THROWS_AS(conv2d_strided(Matrix(1, 1), Matrix(2, 2), 0), ArgumentError);
  }

  TEST_CASE("output extent") {
    CHECK(strided_output_extent(28, 5, 1) == 24);
    CHECK(strided_output_extent(24, 2, 2) == 12);
    CHECK(strided_output_extent(8, 4, 2) == 3);
  }

  TEST_CASE("single channel multichannel conv is conv2d") {
    std::mt19937_64 rng(3);
    const Matrix h = random_matrix(rng, 3, 2);
    const Matrix x = random_matrix(rng, 7, 6);
    Filter f(1, 1, 3, 2);
    f.set_slice(1, 1, h);
    FeatureMap fm({1, 7, 6});
    fm.set_channel(1, x);
    CHECK(conv_multichannel(f, fm, 1).channel(1) == conv2d(h, x));
    CHECK(conv_multichannel(f, fm, 2).channel(1) == conv2d_strided(h, x, 2));
  }

  TEST_CASE("zero filter slice ignores its channel") {
    std::mt19937_64 rng(5);
    Filter f(1, 2, 2, 2);
    f.set_slice(1, 1, random_matrix(rng, 2, 2));
    FeatureMap a({2, 4, 4}), b({2, 4, 4});
    a.set_channel(1, random_matrix(rng, 4, 4));
    b.set_channel(1, a.channel(1));
    a.set_channel(2, random_matrix(rng, 4, 4));
    b.set_channel(2, random_matrix(rng, 4, 4));
    CHECK(conv_multichannel(f, a, 1) == conv_multichannel(f, b, 1));
  }

  TEST_CASE("two-channel stride-1 sum reproduces the strided 1-D result") {
    Filter f(1, 2, 1, 2);
    f.set_slice(1, 1, row({1, 3}));
    f.set_slice(1, 2, row({2, 4}));
    FeatureMap x({2, 1, 4});
    x.set_channel(1, row({1, 3, 5, 7}));
    x.set_channel(2, row({2, 4, 6, 8}));
    CHECK(conv_multichannel(f, x, 1).channel(1) == row({30, 50, 70}));
  }

  TEST_CASE("channel mismatch is a shape error") {
    CHECK_THROWS_AS(conv_multichannel(Filter(1, 2, 1, 1), FeatureMap({3, 2, 2}), 1), ShapeError);
  }

  TEST_CASE("convolutional tensor layout") {
    const Matrix h = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    const Tensor4 t = build_conv_tensor(h, 5, 5);
    CHECK(t.dims() == Shape4{3, 3, 5, 5});
    CHECK(t(2, 3, 2, 3) == 1);
    CHECK(t(2, 3, 4, 5) == 9);
    CHECK(t(2, 3, 1, 1) == 0);
    CHECK(is_conv_tensor(t));
    CHECK(extract_filter(t) == h);

    const Tensor4 small = build_conv_tensor(Matrix::from_rows({{1, 2}, {3, 4}}), 5, 5);
    CHECK(small.dims() == Shape4{4, 4, 5, 5});
  }

  TEST_CASE("1x1 filter gives a scaled diagonal") {
    const Tensor4 t = build_conv_tensor(Matrix::from_rows({{2.5}}), 3, 4);
    for (std::size_t i = 1; i <= 3; ++i)
      for (std::size_t j = 1; j <= 4; ++j)
        for (std::size_t k = 1; k <= 3; ++k)
          for (std::size_t l = 1; l <= 4; ++l) CHECK(t(i, j, k, l) == (k == i && l == j ? 2.5 : 0.0));
  }

  TEST_CASE("tensor product with the conv tensor is convolution") {
    std::mt19937_64 rng(11);
    const Matrix h = random_matrix(rng, 3, 4);
    const Matrix x = random_matrix(rng, 7, 9);
    const Matrix a = conv2d(h, x);
    const Matrix b = tensor_product(build_conv_tensor(h, 7, 9), x);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values()[i] == doctest::Approx(b.values()[i]).epsilon(1e-12));
  }

  TEST_CASE("random dense tensor is not convolutional") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor4 t({3, 3, 4, 4});
    for (auto& v : t.values()) v = dist(rng);
    CHECK_FALSE(is_conv_tensor(t));
    CHECK_THROWS_AS(extract_filter(t), ArgumentError);
  }

  TEST_CASE("all-zero conv tensor gives a 1x1 zero filter") {
    CHECK(extract_filter(Tensor4({2, 2, 3, 3})) == Matrix(1, 1));
  }
}
