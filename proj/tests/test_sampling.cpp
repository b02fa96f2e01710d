#include "doctest.h"

#include "destride/errors.hpp"
#include "destride/sampling.hpp"

using namespace destride;

namespace {

Matrix counting(std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = static_cast<double>(i + 1);
  return m;
}

}  // namespace

TEST_SUITE("sampling") {
  TEST_CASE("sampling spec validation") {
    CHECK_NOTHROW(SamplingSpec(2, 1, 2));
    CHECK_THROWS_AS(SamplingSpec(0, 1, 2), ArgumentError);
    CHECK_THROWS_AS(SamplingSpec(3, 1, 2), ArgumentError);
    CHECK_THROWS_AS(SamplingSpec(1, 1, 0), ArgumentError);
  }

  TEST_CASE("4x4 counting matrix on grid (2,2,2)") {
    CHECK(sample_matrix(counting(4, 4), {2, 2, 2}) == Matrix::from_rows({{6, 8}, {14, 16}}));
  }

  TEST_CASE("6x6 with (1,1,2) keeps odd rows and columns") {
    const Matrix x = counting(6, 6);
    const Matrix s = sample_matrix(x, {1, 1, 2});
    REQUIRE(s.rows() == 3);
    REQUIRE(s.cols() == 3);
    for (std::size_t i = 1; i <= 3; ++i)
      for (std::size_t j = 1; j <= 3; ++j) CHECK(s(i, j) == x(2 * i - 1, 2 * j - 1));
  }

  TEST_CASE("unit stride is the identity") {
    const Matrix x = counting(3, 5);
    CHECK(sample_matrix(x, SamplingSpec::identity()) == x);
    Tensor4 t({2, 3, 2, 2});
    for (std::size_t i = 0; i < t.size(); ++i) t.values()[i] = static_cast<double>(i);
    CHECK(sample_tensor(t, 1, 2, SamplingSpec::identity()) == t);
    CHECK(sample_tensor(t, 3, 4, SamplingSpec::identity()) == t);
  }

  TEST_CASE("empty sample is a shape error") {
    CHECK_THROWS_AS(sample_matrix(counting(1, 4), {2, 1, 2}), ShapeError);
  }

  TEST_CASE("matrix viewed as a tensor samples like the matrix") {
    const Matrix x = counting(6, 6);
    const Tensor4 t({6, 6, 1, 1}, std::vector<double>(x.values().begin(), x.values().end()));
    const Tensor4 s = sample_tensor(t, 1, 2, {2, 1, 2});
    const Matrix expected = sample_matrix(x, {2, 1, 2});
    REQUIRE(s.dims() == Shape4{expected.rows(), expected.cols(), 1, 1});
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(s.values()[i] == expected.values()[i]);
    CHECK_THROWS_AS(sample_tensor(t, 1, 3, {1, 1, 2}), ArgumentError);
  }

  TEST_CASE("double sampling indexes the source with both offsets") {
    Tensor4 h({5, 5, 6, 6});
    for (std::size_t i = 0; i < h.size(); ++i) h.values()[i] = static_cast<double>(i);
    const std::size_t s = 2, m = 2, n = 1, p = 1, q = 2;
    const Tensor4 twice = sample_tensor(sample_tensor(h, 1, 2, {m, n, s}), 3, 4, {p, q, s});
    const auto& d = twice.dims();
    for (std::size_t i = 1; i <= d[0]; ++i)
      for (std::size_t j = 1; j <= d[1]; ++j)
        for (std::size_t k = 1; k <= d[2]; ++k)
          for (std::size_t l = 1; l <= d[3]; ++l)
            CHECK(twice(i, j, k, l) == h((i - 1) * s + m, (j - 1) * s + n, (k - 1) * s + p, (l - 1) * s + q));
  }

  TEST_CASE("zero padding prepends zeros") {
    CHECK(zero_pad(Matrix::from_rows({{5}}), 1, 1) == Matrix::from_rows({{0, 0}, {0, 5}}));
    CHECK(zero_pad(Matrix::from_rows({{1, 2}}), 0, 1) == Matrix::from_rows({{0, 1, 2}}));
    const Matrix x = counting(2, 3);
    CHECK(zero_pad(x, 0, 0) == x);
  }

  TEST_CASE("composition of sampling specs") {
    CHECK(compose_sampling({1, 1, 3}, 1) == SamplingSpec(1, 1, 3));
    CHECK(compose_sampling({2, 2, 2}, 2) == SamplingSpec(3, 3, 4));
    CHECK(compose_sampling({2, 1, 3}, 2) == SamplingSpec(3, 1, 6));
  }

  TEST_CASE("grids partition the matrix") {
    CHECK(partition_cover_check(4, 7, 1));
    CHECK(partition_cover_check(6, 6, 2));
    CHECK(partition_cover_check(5, 5, 2));
    CHECK(partition_cover_check(7, 3, 3));
    CHECK(sampled_extent(5, 1, 2) == 3);
    CHECK(sampled_extent(5, 2, 2) == 2);
    CHECK(sampled_extent(1, 2, 2) == 0);
  }
}
