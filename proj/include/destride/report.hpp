#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "destride/network.hpp"
#include "destride/transform.hpp"

namespace destride {

struct EquivalenceReport {
  std::size_t trials = 0;
  double tolerance = 0.0;
  double max_abs_dev = 0.0;
  std::vector<double> deviations;  // max |original - rewritten| per trial
  bool pass = false;
};

/// Runs `original` on random uniform(-1, 1) inputs and `rewritten` on the
/// same inputs rearranged by `input_map`, comparing outputs elementwise.
/// Throws ArgumentError when `trials` is zero, ShapeError when the networks
/// do not conform.
EquivalenceReport verify_equivalence(const NetworkSpec& original, const NetworkSpec& rewritten,
                                     const ChannelMap& input_map, std::size_t trials, double tol,
                                     std::uint64_t seed);

/// Capacity and weight-sharing summary of one rewritten conv layer.
struct LayerParameterReport {
  std::size_t original_layer = 0;
  std::size_t transformed_layer = 0;
  std::string original_desc;
  std::string transformed_desc;
  std::size_t outer_stride = 1;
  std::size_t original_count = 0;    // C_out * C_in * a * b
  std::size_t stored_volume = 0;     // weights stored by the rewritten layer
  std::size_t traced_count = 0;      // stored weights copied from an original weight
  std::size_t padding_zeros = 0;     // stored weights that are structural zeros
  std::size_t distinct_sources = 0;  // distinct original weights referenced
  double ratio = 1.0;                // traced_count / original_count
  bool sharing_ok = false;  // distinct == original and traced == outer_stride^2 * original
  bool values_match = false;  // every stored weight equals its source (or 0 for padding)
};

struct ParameterReport {
  std::vector<LayerParameterReport> layers;

  bool ok() const noexcept;
};

ParameterReport parameter_report(const NetworkSpec& original, const NetworkSpec& rewritten,
                                 const std::vector<LayerTrace>& trace);

}  // namespace destride
