#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "destride/conv.hpp"
#include "destride/tensor.hpp"

namespace destride {

enum class Activation { identity, relu };

std::string_view activation_name(Activation a);
/// Parses "relu" / "identity"; throws ArgumentError otherwise.
Activation parse_activation(std::string_view name);
double apply_activation(Activation a, double v) noexcept;

/// Valid-mode convolution. In-channel count lives in the filter.
struct ConvLayer {
  Filter weights;
  std::size_t stride = 1;

  friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

struct ActivationLayer {
  Activation function = Activation::relu;

  friend bool operator==(const ActivationLayer&, const ActivationLayer&) = default;
};

/// Fully-connected layer. The first one in a network flattens the incoming
/// feature map channel-major (channel, row, col). With `flatten_order` set,
/// position j of the flattened vector is taken from 1-based offset
/// `flatten_order[j-1]` of the channel-major buffer.
struct DenseLayer {
  Matrix weights;  // units x inputs
  std::optional<std::vector<std::size_t>> flatten_order;

  std::size_t units() const noexcept { return weights.rows(); }
  std::size_t inputs() const noexcept { return weights.cols(); }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

using Layer = std::variant<ConvLayer, ActivationLayer, DenseLayer>;

enum class LayerKind { conv, activation, fully_connected };
LayerKind kind_of(const Layer& layer) noexcept;
std::string_view kind_name(LayerKind k);

/// Feed-forward network: conv layers and elementwise activations, optionally
/// followed by fully-connected layers. No biases.
struct NetworkSpec {
  std::string name;
  std::string provenance = "original";  // or "transformed-from:<name>"
  MapShape input_shape{};
  std::vector<Layer> layers;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Weightless layer description used to assemble a NetworkSpec; in-channel
/// and fan-in counts are inferred from the running shape.
struct ConvDesc {
  std::size_t channels_out;
  std::size_t kernel_h;
  std::size_t kernel_w;
  std::size_t stride = 1;
};
struct ActivationDesc {
  Activation function = Activation::relu;
};
struct DenseDesc {
  std::size_t units;
};
using LayerDesc = std::variant<ConvDesc, ActivationDesc, DenseDesc>;

/// Builds a network with all weights zero. Throws ShapeError when a kernel
/// does not fit its input or a conv layer follows a fully-connected one.
NetworkSpec build_network(std::string name, MapShape input, const std::vector<LayerDesc>& layers);

/// Output shape of one layer. Fully-connected outputs are reported as
/// (units, 1, 1) with `flat` set.
struct LayerShape {
  std::size_t layer;  // 1-based index into NetworkSpec::layers
  LayerKind kind;
  MapShape shape;
  bool flat = false;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Per-layer output shapes. Conv extents are floor((h - a) / s) + 1. Throws
/// ShapeError naming the layer on any inconsistency between declared weights
/// and the incoming shape.
std::vector<LayerShape> infer_shapes(const NetworkSpec& spec);

/// Output of the last layer, flattened channel-major when it is a feature map.
std::vector<double> forward(const NetworkSpec& spec, const FeatureMap& x);

/// Copy of `spec` with every weight drawn from uniform(-1, 1) using a
/// mt19937_64 seeded with `seed`, in layer order.
NetworkSpec init_params(const NetworkSpec& spec, std::uint64_t seed);

/// Feature map with values drawn from uniform(-1, 1).
FeatureMap random_feature_map(MapShape shape, std::uint64_t seed);

/// Short human description, e.g. "5x5 conv 20 stride 2", "fc 500", "relu".
std::string describe(const Layer& layer);

std::size_t parameter_count(const Layer& layer) noexcept;

}  // namespace destride
