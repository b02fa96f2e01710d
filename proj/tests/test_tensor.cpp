#include "doctest.h"

#include "destride/errors.hpp"
#include "destride/tensor.hpp"

using namespace destride;

TEST_SUITE("tensor") {
  TEST_CASE("matrix access is 1-based and row-major") {
    const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 1) == 1);
    CHECK(m(2, 3) == 6);
    CHECK(m.at(2, 1) == 4);
    CHECK_THROWS_AS(m.at(0, 1), IndexError);
    CHECK_THROWS_AS(m.at(3, 1), IndexError);
    CHECK_THROWS_AS(Matrix(2, 2, {1, 2, 3}), ShapeError);
  }

  TEST_CASE("tensor set/get round-trip and bounds") {
    Tensor4 t({2, 3, 4, 5});
    t.set(2, 3, 4, 5, 7.5);
    t.set(1, 2, 3, 1, -1.0);
    CHECK(t.at(2, 3, 4, 5) == 7.5);
    CHECK(t(1, 2, 3, 1) == -1.0);
    CHECK(t.dim(3) == 4);
    CHECK_THROWS_AS(t.at(3, 1, 1, 1), IndexError);
    CHECK_THROWS_AS(t.set(1, 1, 1, 6, 0.0), IndexError);
  }

  TEST_CASE("tensor product with a zero tensor is zero") {
    const Tensor4 h({2, 2, 3, 3});
    const Matrix x = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    CHECK(tensor_product(h, x) == Matrix(2, 2));
  }

  TEST_CASE("single indicator selects one element") {
    Tensor4 h({2, 2, 3, 3});
    h(1, 1, 2, 2) = 1.0;
    const Matrix x = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    const Matrix m = tensor_product(h, x);
    CHECK(m(1, 1) == 5.0);
    CHECK(m(1, 2) == 0.0);
    CHECK(m(2, 2) == 0.0);
  }

  TEST_CASE("tensor product contracts the trailing pair against the image") {
    Tensor4 h({1, 1, 2, 3});
    for (std::size_t i = 0; i < h.size(); ++i) h.values()[i] = static_cast<double>(i + 1);
    const Matrix x = Matrix::from_rows({{1, 0, 2}, {0, 1, 0}});
    // 1*1 + 3*2 + 5*1
    CHECK(tensor_product(h, x)(1, 1) == 12.0);
    CHECK_THROWS_AS(tensor_product(h, Matrix(3, 2)), ShapeError);
  }

  TEST_CASE("slicing") {
    Tensor4 t({2, 2, 2, 2});
    for (std::size_t i = 0; i < t.size(); ++i) t.values()[i] = static_cast<double>(i);

    CHECK(slice_region(t, {Range{1, 2}, Range{1, 2}, Range{1, 2}, Range{1, 2}}) == t);

    const Tensor4 block = slice_region(t, {Range{1, 1}, Range{1, 1}, Range{1, 2}, Range{1, 2}});
    CHECK(block.dims() == Shape4{1, 1, 2, 2});
    CHECK(block.values()[0] == 0.0);
    CHECK(block.values()[3] == 3.0);

    CHECK_THROWS_AS(slice_region(t, {Range{1, 3}, Range{1, 1}, Range{1, 1}, Range{1, 1}}), IndexError);
    CHECK_THROWS(slice_region(t, {Range{2, 1}, Range{1, 1}, Range{1, 1}, Range{1, 1}}));
  }

  TEST_CASE("shape strings") {
    CHECK(shape_string(Matrix(3, 4)) == "3x4");
    CHECK(shape_string(Shape4{3, 3, 5, 5}) == "3x3x5x5");
  }
}
