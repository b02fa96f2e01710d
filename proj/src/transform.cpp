#include "destride/transform.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "destride/errors.hpp"

namespace destride {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void add_cropped(Matrix& acc, const Matrix& term) {
  if (term.rows() < acc.rows() || term.cols() < acc.cols()) {
    throw std::logic_error("convolution term " + shape_string(term) + " smaller than output " +
                           shape_string(acc));
  }
  for (std::size_t i = 1; i <= acc.rows(); ++i)
    for (std::size_t j = 1; j <= acc.cols(); ++j) acc(i, j) += term(i, j);
}

// Rewritten filter bank of one conv layer plus the provenance of each weight.
struct RewrittenConv {
  Filter weights;
  std::vector<WeightSource> sources;
};

RewrittenConv rewrite_conv(const Filter& h, std::size_t stride, std::size_t outer) {
  const std::size_t inner = outer * stride;
  const ChannelMap out_map(h.channels_out(), outer);
  const ChannelMap in_map(h.channels_in(), inner);
  // Largest sampled extent over all output offsets; the last offset pads most.
  const std::size_t kr = ceil_div(h.rows() + (outer - 1) * stride, inner);
  const std::size_t kc = ceil_div(h.cols() + (outer - 1) * stride, inner);

  RewrittenConv result{Filter(out_map.size(), in_map.size(), kr, kc), {}};
  result.sources.reserve(result.weights.size());
  for (const auto& o : out_map.entries()) {
    // Rows/cols of padding placed before the filter: m' - 1 with m' = (m-1)*stride + 1.
    const std::size_t pad_r = (o.p - 1) * stride;
    const std::size_t pad_c = (o.q - 1) * stride;
    const std::size_t oi = out_map.channel_index(o.source_channel, o.p, o.q);
    for (const auto& in : in_map.entries()) {
      const std::size_t ii = in_map.channel_index(in.source_channel, in.p, in.q);
      for (std::size_t u = 1; u <= kr; ++u) {
        for (std::size_t v = 1; v <= kc; ++v) {
          const std::size_t pr = (u - 1) * inner + in.p;
          const std::size_t pc = (v - 1) * inner + in.q;
          WeightSource src;
          if (pr > pad_r && pc > pad_c && pr - pad_r <= h.rows() && pc - pad_c <= h.cols()) {
            src = {false, o.source_channel, in.source_channel, pr - pad_r, pc - pad_c};
            result.weights(oi, ii, u, v) = h(src.out, src.in, src.row, src.col);
          }
          result.sources.push_back(src);
        }
      }
    }
  }
  return result;
}

std::vector<std::size_t> invert(const std::vector<std::size_t>& order, const std::string& label) {
  std::vector<std::size_t> inv(order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto o = order[i];
    if (o < 1 || o > order.size() || inv[o - 1] != 0) throw ShapeError(label + ": flatten order is not a permutation");
    inv[o - 1] = i + 1;
  }
  return inv;
}

}  // namespace

ChannelMap::ChannelMap(std::size_t source_channels, std::size_t stride)
    : source_channels_(source_channels), stride_(stride) {
  if (source_channels < 1 || stride < 1) throw ArgumentError("channel map needs positive channels and stride");
  entries_.reserve(source_channels * stride * stride);
  for (std::size_t k = 1; k <= source_channels; ++k)
    for (std::size_t p = 1; p <= stride; ++p)
      for (std::size_t q = 1; q <= stride; ++q) entries_.push_back({k, p, q, SamplingSpec(p, q, stride)});
}

std::size_t ChannelMap::channel_index(std::size_t k, std::size_t p, std::size_t q) const {
  if (k < 1 || k > source_channels_ || p < 1 || p > stride_ || q < 1 || q > stride_) {
    throw IndexError("channel (" + std::to_string(k) + "," + std::to_string(p) + "," + std::to_string(q) +
                     ") outside channel map");
  }
  return ((k - 1) * stride_ + (p - 1)) * stride_ + (q - 1) + 1;
}

FlattenPermutation::FlattenPermutation(std::vector<std::size_t> sources) : sources_(std::move(sources)) {
  std::vector<bool> seen(sources_.size(), false);
  for (auto s : sources_) {
    if (s < 1 || s > sources_.size() || seen[s - 1]) {
      throw ArgumentError("flatten permutation is not a bijection on 1.." + std::to_string(sources_.size()));
    }
    seen[s - 1] = true;
  }
}

FlattenPermutation FlattenPermutation::identity(std::size_t n) {
  std::vector<std::size_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i + 1;
  return FlattenPermutation(std::move(s));
}

bool FlattenPermutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < sources_.size(); ++i)
    if (sources_[i] != i + 1) return false;
  return true;
}

FeatureMap reshape_input(const FeatureMap& x, const ChannelMap& map) {
  if (x.channels() != map.source_channels()) {
    throw ShapeError("feature map " + shape_string(x.shape()) + " has " + std::to_string(x.channels()) +
                     " channels, channel map expects " + std::to_string(map.source_channels()));
  }
  const std::size_t s = map.stride();
  if (x.height() % s != 0 || x.width() % s != 0) {
    throw DivisibilityError("feature map " + shape_string(x.shape()) + " not divisible by stride " +
                            std::to_string(s));
  }
  const std::size_t h = x.height() / s, w = x.width() / s;
  FeatureMap out({map.size(), h, w});
  std::size_t c = 0;
  for (const auto& e : map.entries()) {
    ++c;
    for (std::size_t i = 1; i <= h; ++i)
      for (std::size_t j = 1; j <= w; ++j) out(c, i, j) = x(e.source_channel, (i - 1) * s + e.p, (j - 1) * s + e.q);
  }
  return out;
}

Matrix StrideDecomposition::combine() const {
  Matrix acc(output_rows, output_cols);
  for (std::size_t i = 0; i < filters.size(); ++i) add_cropped(acc, conv2d(filters[i], channels[i]));
  return acc;
}

StrideDecomposition destride_layer(const Matrix& h, const Matrix& x, std::size_t stride) {
  if (h.rows() > x.rows() || h.cols() > x.cols()) {
    throw ShapeError("filter " + shape_string(h) + " larger than image " + shape_string(x));
  }
  StrideDecomposition d{{}, {}, {}, strided_output_extent(x.rows(), h.rows(), stride),
                        strided_output_extent(x.cols(), h.cols(), stride)};
  for (std::size_t p = 1; p <= stride; ++p) {
    for (std::size_t q = 1; q <= stride; ++q) {
      if (sampled_extent(h.rows(), p, stride) == 0 || sampled_extent(h.cols(), q, stride) == 0) continue;
      const SamplingSpec grid(p, q, stride);
      d.filters.push_back(sample_matrix(h, grid));
      d.channels.push_back(sample_matrix(x, grid));
      d.grids.emplace_back(p, q);
    }
  }
  return d;
}

SampledConvIdentity sampled_conv_identity(const Matrix& h, const Matrix& x, std::size_t m, std::size_t n,
                                          std::size_t s) {
  const SamplingSpec outer(m, n, s);
  Matrix lhs = sample_matrix(conv2d(h, x), outer);

  const Matrix padded = zero_pad(h, m - 1, n - 1);
  Matrix rhs(lhs.rows(), lhs.cols());
  for (std::size_t p = 1; p <= s; ++p) {
    for (std::size_t q = 1; q <= s; ++q) {
      if (sampled_extent(padded.rows(), p, s) == 0 || sampled_extent(padded.cols(), q, s) == 0) continue;
      const SamplingSpec grid(p, q, s);
      add_cropped(rhs, conv2d(sample_matrix(padded, grid), sample_matrix(x, grid)));
    }
  }
  return {std::move(lhs), std::move(rhs)};
}

TransformResult transform_network(const NetworkSpec& spec, const TransformOptions& options) {
  const auto shapes = infer_shapes(spec);
  if (options.output_stride < 1) throw ArgumentError("output stride must be >= 1");

  std::vector<std::size_t> conv_pos;
  std::vector<MapShape> conv_in;
  bool has_dense = false;
  {
    MapShape cur = spec.input_shape;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
      if (kind_of(spec.layers[i]) == LayerKind::conv) {
        conv_pos.push_back(i);
        conv_in.push_back(cur);
      }
      if (kind_of(spec.layers[i]) == LayerKind::fully_connected) has_dense = true;
      cur = shapes[i].shape;
    }
  }
  if (options.output_stride > 1 && !has_dense) {
    throw ArgumentError("output stride > 1 needs a fully-connected layer to absorb the re-indexing");
  }

  // Sampling stride applied to each conv layer's output, folded back from the last one.
  std::vector<std::size_t> outer(conv_pos.size());
  for (std::size_t j = conv_pos.size(); j-- > 0;) {
    outer[j] = j + 1 == conv_pos.size()
                   ? options.output_stride
                   : outer[j + 1] * std::get<ConvLayer>(spec.layers[conv_pos[j + 1]]).stride;
  }

  MapShape final_map = spec.input_shape;
  for (std::size_t j = 0; j < conv_pos.size(); ++j) {
    const auto& conv = std::get<ConvLayer>(spec.layers[conv_pos[j]]);
    const std::size_t inner = outer[j] * conv.stride;
    const auto& in = conv_in[j];
    if (in.height % inner != 0 || in.width % inner != 0) {
      throw DivisibilityError("layer " + std::to_string(conv_pos[j] + 1) + " (" + describe(conv) + "): input " +
                              std::to_string(in.height) + "x" + std::to_string(in.width) +
                              " not divisible by cumulative stride " + std::to_string(inner));
    }
    final_map = shapes[conv_pos[j]].shape;
  }
  if (final_map.height % options.output_stride != 0 || final_map.width % options.output_stride != 0) {
    throw DivisibilityError("final feature map " + shape_string(final_map) + " not divisible by output stride " +
                            std::to_string(options.output_stride));
  }

  const std::size_t input_stride =
      conv_pos.empty() ? options.output_stride : outer[0] * std::get<ConvLayer>(spec.layers[conv_pos[0]]).stride;

  // Flattened position j of the rearranged final map -> original position.
  const std::size_t fs = options.output_stride;
  const ChannelMap final_channels(final_map.channels, fs);
  std::vector<std::size_t> sources;
  sources.reserve(final_map.volume());
  {
    const std::size_t h = final_map.height / fs, w = final_map.width / fs;
    for (const auto& e : final_channels.entries())
      for (std::size_t i = 1; i <= h; ++i)
        for (std::size_t j = 1; j <= w; ++j) {
          const std::size_t r = (i - 1) * fs + e.p, c = (j - 1) * fs + e.q;
          sources.push_back(((e.source_channel - 1) * final_map.height + (r - 1)) * final_map.width + c);
        }
  }

  TransformResult result{
      NetworkSpec{spec.name + "-unity-stride", "transformed-from:" + spec.name, {}, {}},
      ChannelMap(spec.input_shape.channels, input_stride),
      FlattenPermutation(std::move(sources)),
      {},
  };
  result.spec.input_shape = {spec.input_shape.channels * input_stride * input_stride,
                             spec.input_shape.height / input_stride, spec.input_shape.width / input_stride};

  bool flattened = false;
  std::size_t conv_no = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& layer = spec.layers[i];
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      const std::size_t s_out = outer[conv_no++];
      auto rewritten = rewrite_conv(conv->weights, conv->stride, s_out);
      result.trace.push_back({i + 1, i + 1, s_out, s_out * conv->stride, std::move(rewritten.sources)});
      result.spec.layers.emplace_back(ConvLayer{std::move(rewritten.weights), 1});
    } else if (const auto* dense = std::get_if<DenseLayer>(&layer); dense && !flattened) {
      flattened = true;
      const std::string label = "layer " + std::to_string(i + 1) + " (fully_connected)";
      std::vector<std::size_t> inv;
      if (dense->flatten_order) inv = invert(*dense->flatten_order, label);
      Matrix w(dense->units(), dense->inputs());
      for (std::size_t j = 1; j <= dense->inputs(); ++j) {
        const std::size_t orig = result.flatten.source_of(j);
        const std::size_t col = inv.empty() ? orig : inv[orig - 1];
        for (std::size_t r = 1; r <= dense->units(); ++r) w(r, j) = dense->weights(r, col);
      }
      result.spec.layers.emplace_back(DenseLayer{std::move(w), std::nullopt});
    } else {
      result.spec.layers.push_back(layer);
    }
  }

  // Every rewritten conv output must be exactly the rearranged original output.
  const auto new_shapes = infer_shapes(result.spec);
  conv_no = 0;
  for (std::size_t j = 0; j < conv_pos.size(); ++j) {
    const auto& orig = shapes[conv_pos[j]].shape;
    const auto& got = new_shapes[conv_pos[j]].shape;
    const std::size_t s = outer[j];
    if (got != MapShape{orig.channels * s * s, orig.height / s, orig.width / s}) {
      throw std::logic_error("rewritten layer " + std::to_string(conv_pos[j] + 1) + " yields " + shape_string(got) +
                             ", expected rearrangement of " + shape_string(orig));
    }
  }
  return result;
}

}  // namespace destride
