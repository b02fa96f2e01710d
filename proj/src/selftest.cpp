#include "destride/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "destride/conv.hpp"
#include "destride/errors.hpp"
#include "destride/fixtures.hpp"
#include "destride/report.hpp"
#include "destride/sampling.hpp"
#include "destride/transform.hpp"

namespace destride {

namespace {

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = dist(rng);
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  return d;
}

// Top-left bounding box of the nonzeros, 1x1 zero when there are none.
Matrix trim_trailing_zeros(const Matrix& m) {
  std::size_t rows = 0, cols = 0;
  for (std::size_t i = 1; i <= m.rows(); ++i)
    for (std::size_t j = 1; j <= m.cols(); ++j)
      if (m(i, j) != 0.0) {
        rows = std::max(rows, i);
        cols = std::max(cols, j);
      }
  if (rows == 0) return Matrix(1, 1);
  Matrix out(rows, cols);
  for (std::size_t i = 1; i <= rows; ++i)
    for (std::size_t j = 1; j <= cols; ++j) out(i, j) = m(i, j);
  return out;
}

struct Tally {
  PropertyResult r;
  double tol;

  void check(double dev) {
    ++r.cases;
    r.max_dev = std::max(r.max_dev, dev);
    if (!(dev <= tol)) r.pass = false;
  }
  void check(bool ok) { check(ok ? 0.0 : std::numeric_limits<double>::infinity()); }
};

PropertyResult tensor_linearity(Rng& rng) {
  Tally t{{"tensor_linearity", true, 0, 0.0, {}}, 1e-12};
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int c = 0; c < 100; ++c) {
    const Shape4 d{pick(rng, 1, 4), pick(rng, 1, 4), pick(rng, 1, 5), pick(rng, 1, 5)};
    Tensor4 h(d);
    for (auto& v : h.values()) v = coef(rng);
    const Matrix x = random_matrix(rng, d[2], d[3]);
    const Matrix y = random_matrix(rng, d[2], d[3]);
    const double a = coef(rng), b = coef(rng);
    Matrix mix(d[2], d[3]);
    for (std::size_t i = 0; i < mix.size(); ++i) mix.values()[i] = a * x.values()[i] + b * y.values()[i];
    const Matrix lhs = tensor_product(h, mix);
    const Matrix px = tensor_product(h, x), py = tensor_product(h, y);
    double dev = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = a * px.values()[i] + b * py.values()[i];
      dev = std::max(dev, std::abs(lhs.values()[i] - rhs));
      scale = std::max(scale, std::abs(rhs));
    }
    t.check(dev / scale);
  }
  return t.r;
}

PropertyResult partition(Rng& rng) {
  Tally t{{"partition", true, 0, 0.0, {}}, 0.0};
  for (std::size_t s = 1; s <= 4; ++s) {
    for (std::size_t rows = 1; rows <= 9; ++rows) {
      for (std::size_t cols = 1; cols <= 9; ++cols) {
        t.check(partition_cover_check(rows, cols, s));
        const Matrix x = random_matrix(rng, rows, cols);
        std::vector<double> seen;
        for (std::size_t p = 1; p <= s; ++p)
          for (std::size_t q = 1; q <= s; ++q) {
            if (sampled_extent(rows, p, s) == 0 || sampled_extent(cols, q, s) == 0) continue;
            const Matrix part = sample_matrix(x, {p, q, s});
            seen.insert(seen.end(), part.values().begin(), part.values().end());
          }
        std::vector<double> all(x.values().begin(), x.values().end());
        std::sort(seen.begin(), seen.end());
        std::sort(all.begin(), all.end());
        t.check(seen == all);
      }
    }
  }
  return t.r;
}

PropertyResult composition(Rng& rng) {
  Tally t{{"composition", true, 0, 0.0, {}}, 0.0};
  for (int c = 0; c < 20; ++c) {
    for (std::size_t s = 1; s <= 3; ++s) {
      for (std::size_t inner = 1; inner <= 3; ++inner) {
        const Matrix x = random_matrix(rng, pick(rng, 9, 14), pick(rng, 9, 14));
        for (std::size_t m = 1; m <= s; ++m)
          for (std::size_t n = 1; n <= s; ++n) {
            const SamplingSpec outer(m, n, s);
            const Matrix twice = sample_matrix(sample_matrix(x, {1, 1, inner}), outer);
            t.check(twice == sample_matrix(x, compose_sampling(outer, inner)));
          }
      }
    }
  }
  return t.r;
}

PropertyResult property12(Rng& rng) {
  Tally t{{"property12", true, 0, 0.0, {}}, 0.0};
  for (int c = 0; c < 100; ++c) {
    const Matrix h = random_matrix(rng, pick(rng, 1, 4), pick(rng, 1, 4));
    const std::size_t rows = h.rows() + pick(rng, 1, 4), cols = h.cols() + pick(rng, 1, 4);
    Tensor4 conv = build_conv_tensor(h, rows, cols);
    t.check(is_conv_tensor(conv));

    // A perturbed element that has a shift partner breaks the structure.
    const auto& d = conv.dims();
    const std::size_t i = pick(rng, 1, d[0]), j = pick(rng, 1, d[1]), k = pick(rng, 1, d[2]), l = pick(rng, 1, d[3]);
    const bool partnered = (i < d[0] && k < d[2]) || (i > 1 && k > 1) || (j < d[1] && l < d[3]) || (j > 1 && l > 1);
    if (partnered) {
      conv(i, j, k, l) += 1.0;
      t.check(!is_conv_tensor(conv));
    }
  }
  return t.r;
}

PropertyResult property3(Rng& rng) {
  Tally t{{"property3", true, 0, 0.0, {}}, 1e-12};
  for (int c = 0; c < 200; ++c) {
    const Matrix h = random_matrix(rng, pick(rng, 1, 5), pick(rng, 1, 5));
    const Matrix x = random_matrix(rng, pick(rng, h.rows(), 9), pick(rng, h.cols(), 9));
    t.check(max_abs_diff(conv2d(h, x), tensor_product(build_conv_tensor(h, x.rows(), x.cols()), x)));
  }
  return t.r;
}

PropertyResult property4(Rng& rng) {
  Tally t{{"property4", true, 0, 0.0, {}}, 0.0};
  for (int c = 0; c < 50; ++c) {
    for (std::size_t s = 2; s <= 3; ++s) {
      const Matrix h = random_matrix(rng, pick(rng, 1, 4), pick(rng, 1, 4));
      const std::size_t rows = h.rows() + s - 1 + pick(rng, 0, 3);
      const std::size_t cols = h.cols() + s - 1 + pick(rng, 0, 3);
      const Tensor4 conv = build_conv_tensor(h, rows, cols);
      for (std::size_t m = 1; m <= s; ++m)
        for (std::size_t n = 1; n <= s; ++n) {
          const Tensor4 outer = sample_tensor(conv, 1, 2, {m, n, s});
          for (std::size_t p = 1; p <= s; ++p)
            for (std::size_t q = 1; q <= s; ++q) {
              const Tensor4 twice = sample_tensor(outer, 3, 4, {p, q, s});
              t.check(is_conv_tensor(twice));
              const Matrix padded = zero_pad(h, m - 1, n - 1);
              const bool empty = sampled_extent(padded.rows(), p, s) == 0 || sampled_extent(padded.cols(), q, s) == 0;
              const Matrix expected = empty ? Matrix(1, 1) : trim_trailing_zeros(sample_matrix(padded, {p, q, s}));
              t.check(extract_filter(twice) == expected);
            }
        }
    }
  }
  return t.r;
}

PropertyResult lemma1(Rng& rng) {
  Tally t{{"lemma1", true, 0, 0.0, {}}, 1e-12};
  for (int c = 0; c < 100; ++c) {
    for (std::size_t s = 1; s <= 3; ++s) {
      const Matrix h = random_matrix(rng, pick(rng, 1, 5), pick(rng, 1, 5));
      const Matrix x = random_matrix(rng, h.rows() + s - 1 + pick(rng, 0, 6), h.cols() + s - 1 + pick(rng, 0, 6));
      for (std::size_t m = 1; m <= s; ++m)
        for (std::size_t n = 1; n <= s; ++n) {
          const auto id = sampled_conv_identity(h, x, m, n, s);
          t.check(max_abs_diff(id.lhs, id.rhs));
        }
    }
  }
  return t.r;
}

PropertyResult theorem1(Rng& rng) {
  Tally t{{"theorem1", true, 0, 0.0, {}}, 1e-12};
  for (int c = 0; c < 100; ++c) {
    for (std::size_t s = 1; s <= 3; ++s) {
      const Matrix h = random_matrix(rng, pick(rng, 1, 5), pick(rng, 1, 5));
      const Matrix x = random_matrix(rng, pick(rng, h.rows(), 12), pick(rng, h.cols(), 12));
      t.check(max_abs_diff(destride_layer(h, x, s).combine(), conv2d_strided(h, x, s)));
    }
  }
  return t.r;
}

PropertyResult theorem2(Rng& rng) {
  Tally t{{"theorem2", true, 0, 0.0, {}}, 1e-9};
  for (int c = 0; c < 40; ++c) {
    const NetworkSpec spec = init_params(random_strided_network(rng()), rng());
    const auto rewritten = transform_network(spec);
    const auto report = verify_equivalence(spec, rewritten.spec, rewritten.input_map, 3, 1e-9, rng());
    t.check(report.max_abs_dev);
  }
  return t.r;
}

using Suite = std::function<PropertyResult(Rng&)>;

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> all = {
      {"tensor_linearity", tensor_linearity},
      {"partition", partition},
      {"composition", composition},
      {"property12", property12},
      {"property3", property3},
      {"property4", property4},
      {"lemma1", lemma1},
      {"theorem1", theorem1},
      {"theorem2", theorem2},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& selftest_properties() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, _] : suites()) n.push_back(name);
    return n;
  }();
  return names;
}

std::vector<PropertyResult> run_selftest(std::uint64_t seed, const std::optional<std::string>& property) {
  if (property && std::find(selftest_properties().begin(), selftest_properties().end(), *property) ==
                      selftest_properties().end()) {
    throw ArgumentError("unknown property '" + *property + "'");
  }
  std::vector<PropertyResult> results;
  std::size_t index = 0;
  for (const auto& [name, suite] : suites()) {
    // Each suite gets its own stream so filtering does not shift the others.
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * ++index));
    if (property && *property != name) continue;
    try {
      results.push_back(suite(rng));
    } catch (const std::exception& e) {
      results.push_back({name, false, 0, 0.0, e.what()});
    }
  }
  return results;
}

}  // namespace destride
