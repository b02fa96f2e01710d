#include "destride/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <tuple>

#include "destride/errors.hpp"

namespace destride {

EquivalenceReport verify_equivalence(const NetworkSpec& original, const NetworkSpec& rewritten,
                                     const ChannelMap& input_map, std::size_t trials, double tol,
                                     std::uint64_t seed) {
  if (trials == 0) throw ArgumentError("verify_equivalence needs at least one trial");
  if (!(tol >= 0.0)) throw ArgumentError("tolerance must be non-negative");

  EquivalenceReport report;
  report.trials = trials;
  report.tolerance = tol;
  report.deviations.reserve(trials);

  std::mt19937_64 seeds(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const FeatureMap x = random_feature_map(original.input_shape, seeds());
    const auto expected = forward(original, x);
    const auto got = forward(rewritten, reshape_input(x, input_map));
    if (expected.size() != got.size()) {
      throw ShapeError("outputs differ in length: " + std::to_string(expected.size()) + " vs " +
                       std::to_string(got.size()));
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double d = std::abs(expected[i] - got[i]);
      dev = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(dev, d);
    }
    report.deviations.push_back(dev);
    report.max_abs_dev = std::max(report.max_abs_dev, dev);
  }
  report.pass = report.max_abs_dev <= tol;
  return report;
}

bool ParameterReport::ok() const noexcept {
  return std::all_of(layers.begin(), layers.end(),
                     [](const LayerParameterReport& l) { return l.sharing_ok && l.values_match; });
}

ParameterReport parameter_report(const NetworkSpec& original, const NetworkSpec& rewritten,
                                 const std::vector<LayerTrace>& trace) {
  ParameterReport report;
  for (const auto& lt : trace) {
    if (lt.original_layer < 1 || lt.original_layer > original.layers.size() || lt.transformed_layer < 1 ||
        lt.transformed_layer > rewritten.layers.size()) {
      throw ArgumentError("trace refers to a layer outside the networks");
    }
    const auto* src = std::get_if<ConvLayer>(&original.layers[lt.original_layer - 1]);
    const auto* dst = std::get_if<ConvLayer>(&rewritten.layers[lt.transformed_layer - 1]);
    if (!src || !dst) throw ArgumentError("trace entry does not pair two conv layers");
    if (dst->weights.size() != lt.sources.size()) {
      throw ArgumentError("trace for layer " + std::to_string(lt.transformed_layer) + " covers " +
                          std::to_string(lt.sources.size()) + " weights, layer stores " +
                          std::to_string(dst->weights.size()));
    }

    LayerParameterReport r;
    r.original_layer = lt.original_layer;
    r.transformed_layer = lt.transformed_layer;
    r.original_desc = describe(*src);
    r.transformed_desc = describe(*dst);
    r.outer_stride = lt.outer_stride;
    r.original_count = src->weights.size();
    r.stored_volume = dst->weights.size();
    r.values_match = true;

    std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> distinct;
    const auto stored = dst->weights.values();
    for (std::size_t i = 0; i < lt.sources.size(); ++i) {
      const auto& s = lt.sources[i];
      if (s.padding) {
        ++r.padding_zeros;
        if (stored[i] != 0.0) r.values_match = false;
        continue;
      }
      ++r.traced_count;
      distinct.emplace(s.out, s.in, s.row, s.col);
      if (stored[i] != src->weights.at(s.out, s.in, s.row, s.col)) r.values_match = false;
    }
    r.distinct_sources = distinct.size();
    r.ratio = static_cast<double>(r.traced_count) / static_cast<double>(r.original_count);
    r.sharing_ok = r.distinct_sources == r.original_count &&
                   r.traced_count == lt.outer_stride * lt.outer_stride * r.original_count;
    report.layers.push_back(std::move(r));
  }
  return report;
}

}  // namespace destride
