#include "destride/network.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "destride/errors.hpp"

namespace destride {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string layer_label(std::size_t index, const Layer& layer) {
  return "layer " + std::to_string(index) + " (" + std::string(kind_name(kind_of(layer))) + ")";
}

void fill_uniform(std::span<double> values, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& v : values) v = dist(rng);
}

}  // namespace

std::string_view activation_name(Activation a) {
  return a == Activation::relu ? "relu" : "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  throw ArgumentError("unknown activation '" + std::string(name) + "'");
}

double apply_activation(Activation a, double v) noexcept {
  return a == Activation::relu ? std::max(v, 0.0) : v;
}

LayerKind kind_of(const Layer& layer) noexcept {
  return static_cast<LayerKind>(layer.index());
}

std::string_view kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::conv: return "conv";
    case LayerKind::activation: return "activation";
    case LayerKind::fully_connected: return "fully_connected";
  }
  return "?";
}

NetworkSpec build_network(std::string name, MapShape input, const std::vector<LayerDesc>& layers) {
  NetworkSpec spec;
  spec.name = std::move(name);
  spec.input_shape = input;
  if (input.volume() == 0) throw ShapeError("input shape must be positive, got " + shape_string(input));

  MapShape cur = input;
  bool flat = false;
  std::size_t index = 0;
  for (const auto& desc : layers) {
    ++index;
    std::visit(overloaded{
                   [&](const ConvDesc& c) {
                     if (flat) {
                       throw ShapeError("layer " + std::to_string(index) +
                                        " (conv) follows a fully-connected layer");
                     }
                     if (c.stride < 1) throw ShapeError("layer " + std::to_string(index) + " (conv): stride must be >= 1");
                     if (c.channels_out < 1 || c.kernel_h < 1 || c.kernel_w < 1) {
                       throw ShapeError("layer " + std::to_string(index) + " (conv): dimensions must be >= 1");
                     }
                     if (c.kernel_h > cur.height || c.kernel_w > cur.width) {
                       throw ShapeError("layer " + std::to_string(index) + " (conv): kernel " +
                                        std::to_string(c.kernel_h) + "x" + std::to_string(c.kernel_w) +
                                        " larger than input " + shape_string(cur));
                     }
                     spec.layers.emplace_back(
                         ConvLayer{Filter(c.channels_out, cur.channels, c.kernel_h, c.kernel_w), c.stride});
                     cur = {c.channels_out, (cur.height - c.kernel_h) / c.stride + 1,
                            (cur.width - c.kernel_w) / c.stride + 1};
                   },
                   [&](const ActivationDesc& a) { spec.layers.emplace_back(ActivationLayer{a.function}); },
                   [&](const DenseDesc& d) {
                     if (d.units < 1) throw ShapeError("layer " + std::to_string(index) + " (fully_connected): units must be >= 1");
                     spec.layers.emplace_back(DenseLayer{Matrix(d.units, cur.volume()), std::nullopt});
                     cur = {d.units, 1, 1};
                     flat = true;
                   },
               },
               desc);
  }
  return spec;
}

std::vector<LayerShape> infer_shapes(const NetworkSpec& spec) {
  if (spec.input_shape.volume() == 0) throw ShapeError("input shape must be positive");
  std::vector<LayerShape> shapes;
  MapShape cur = spec.input_shape;
  bool flat = false;
  std::size_t index = 0;
  for (const auto& layer : spec.layers) {
    ++index;
    const auto label = layer_label(index, layer);
    std::visit(overloaded{
                   [&](const ConvLayer& c) {
                     if (flat) throw ShapeError(label + " follows a fully-connected layer");
                     if (c.stride < 1) throw ShapeError(label + ": stride must be >= 1");
                     const auto& w = c.weights;
                     if (w.channels_in() != cur.channels) {
                       throw ShapeError(label + ": weights expect " + std::to_string(w.channels_in()) +
                                        " input channels, incoming map is " + shape_string(cur));
                     }
                     if (w.rows() > cur.height || w.cols() > cur.width) {
                       throw ShapeError(label + ": kernel " + std::to_string(w.rows()) + "x" +
                                        std::to_string(w.cols()) + " larger than input " + shape_string(cur));
                     }
                     cur = {w.channels_out(), (cur.height - w.rows()) / c.stride + 1,
                            (cur.width - w.cols()) / c.stride + 1};
                   },
                   [&](const ActivationLayer&) {},
                   [&](const DenseLayer& d) {
                     if (d.inputs() != cur.volume()) {
                       throw ShapeError(label + ": weights expect " + std::to_string(d.inputs()) +
                                        " inputs, incoming size is " + std::to_string(cur.volume()));
                     }
                     if (d.flatten_order) {
                       if (flat) throw ShapeError(label + ": flatten order only allowed on the first fully-connected layer");
                       if (d.flatten_order->size() != d.inputs()) {
                         throw ShapeError(label + ": flatten order has " + std::to_string(d.flatten_order->size()) +
                                          " entries, expected " + std::to_string(d.inputs()));
                       }
                     }
                     cur = {d.units(), 1, 1};
                     flat = true;
                   },
               },
               layer);
    shapes.push_back({index, kind_of(layer), cur, flat});
  }
  return shapes;
}

std::vector<double> forward(const NetworkSpec& spec, const FeatureMap& x) {
  if (x.shape() != spec.input_shape) {
    throw ShapeError("input " + shape_string(x.shape()) + " does not match network input " +
                     shape_string(spec.input_shape));
  }
  infer_shapes(spec);

  FeatureMap map = x;
  std::vector<double> vec;
  bool flat = false;
  for (const auto& layer : spec.layers) {
    std::visit(overloaded{
                   [&](const ConvLayer& c) { map = conv_multichannel(c.weights, map, c.stride); },
                   [&](const ActivationLayer& a) {
                     auto values = flat ? std::span<double>(vec) : map.values();
                     for (auto& v : values) v = apply_activation(a.function, v);
                   },
                   [&](const DenseLayer& d) {
                     std::vector<double> in;
                     if (!flat) {
                       const auto src = map.values();
                       if (d.flatten_order) {
                         in.reserve(src.size());
                         for (auto off : *d.flatten_order) {
                           if (off < 1 || off > src.size()) throw ShapeError("flatten order entry out of range");
                           in.push_back(src[off - 1]);
                         }
                       } else {
                         in.assign(src.begin(), src.end());
                       }
                     } else {
                       in = std::move(vec);
                     }
                     vec.assign(d.units(), 0.0);
                     const auto w = d.weights.values();
                     for (std::size_t r = 0; r < d.units(); ++r) {
                       double acc = 0.0;
                       const double* row = w.data() + r * d.inputs();
                       for (std::size_t c = 0; c < d.inputs(); ++c) acc += row[c] * in[c];
                       vec[r] = acc;
                     }
                     flat = true;
                   },
               },
               layer);
  }
  if (!flat) {
    const auto src = map.values();
    vec.assign(src.begin(), src.end());
  }
  return vec;
}

NetworkSpec init_params(const NetworkSpec& spec, std::uint64_t seed) {
  NetworkSpec out = spec;
  std::mt19937_64 rng(seed);
  for (auto& layer : out.layers) {
    if (auto* c = std::get_if<ConvLayer>(&layer)) fill_uniform(c->weights.values(), rng);
    if (auto* d = std::get_if<DenseLayer>(&layer)) fill_uniform(d->weights.values(), rng);
  }
  return out;
}

FeatureMap random_feature_map(MapShape shape, std::uint64_t seed) {
  FeatureMap x(shape);
  std::mt19937_64 rng(seed);
  fill_uniform(x.values(), rng);
  return x;
}

std::string describe(const Layer& layer) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const ConvLayer& c) {
                   os << c.weights.rows() << "x" << c.weights.cols() << " conv " << c.weights.channels_out();
                   if (c.stride != 1) os << " stride " << c.stride;
                 },
                 [&](const ActivationLayer& a) { os << activation_name(a.function); },
                 [&](const DenseLayer& d) { os << "fc " << d.units(); },
             },
             layer);
  return os.str();
}

std::size_t parameter_count(const Layer& layer) noexcept {
  if (const auto* c = std::get_if<ConvLayer>(&layer)) return c->weights.size();
  if (const auto* d = std::get_if<DenseLayer>(&layer)) return d->weights.size();
  return 0;
}

}  // namespace destride
