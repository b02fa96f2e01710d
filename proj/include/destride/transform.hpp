#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "destride/conv.hpp"
#include "destride/network.hpp"
#include "destride/sampling.hpp"
#include "destride/tensor.hpp"

namespace destride {

/// One channel of a rearranged feature map: the (p, q) grid of stride `s`
/// taken from source channel k.
struct ChannelEntry {
  std::size_t source_channel;
  std::size_t p;
  std::size_t q;
  SamplingSpec grid;

  friend bool operator==(const ChannelEntry&, const ChannelEntry&) = default;
};

/// Space-to-depth channel layout for `source_channels` channels split by
/// stride `s` into `source_channels * s * s` channels. Channel (k, p, q) sits
/// at index ((k-1)*s + (p-1))*s + (q-1) + 1, so the s*s sub-grids of one
/// source channel are contiguous.
class ChannelMap {
 public:
  ChannelMap(std::size_t source_channels, std::size_t stride);

  static ChannelMap identity(std::size_t channels) { return {channels, 1}; }

  std::size_t source_channels() const noexcept { return source_channels_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<ChannelEntry>& entries() const noexcept { return entries_; }
  const ChannelEntry& entry(std::size_t channel) const { return entries_.at(channel - 1); }

  /// 1-based index of channel (k, p, q).
  std::size_t channel_index(std::size_t k, std::size_t p, std::size_t q) const;

  friend bool operator==(const ChannelMap&, const ChannelMap&) = default;

 private:
  std::size_t source_channels_;
  std::size_t stride_;
  std::vector<ChannelEntry> entries_;
};

/// Bijection between flattened positions of the rewritten network's final
/// feature map and those of the original; position j (1-based) of the
/// rewritten flat vector holds original position `source_of(j)`.
class FlattenPermutation {
 public:
  /// Throws ArgumentError unless `sources` is a permutation of 1..n.
  explicit FlattenPermutation(std::vector<std::size_t> sources);
  static FlattenPermutation identity(std::size_t n);

  std::size_t size() const noexcept { return sources_.size(); }
  std::size_t source_of(std::size_t position) const { return sources_.at(position - 1); }
  const std::vector<std::size_t>& sources() const noexcept { return sources_; }
  bool is_identity() const noexcept;

  friend bool operator==(const FlattenPermutation&, const FlattenPermutation&) = default;

 private:
  std::vector<std::size_t> sources_;
};

/// Rearranges every channel of `x` into the grids of `map`:
/// output channel (k, p, q) is `sample_matrix(x[k], (p, q, s))`. Throws
/// ShapeError on a channel-count mismatch and DivisibilityError unless the
/// height and width are multiples of the stride.
FeatureMap reshape_input(const FeatureMap& x, const ChannelMap& map);

/// Single-layer stride removal: the sampled filters and images whose
/// stride-1 correlations sum to the strided correlation. Grids on which the
/// filter or the image has no samples are dropped, so fewer than s*s pairs
/// may remain for filters or images narrower than the stride.
struct StrideDecomposition {
  std::vector<Matrix> filters;
  std::vector<Matrix> channels;
  std::vector<std::pair<std::size_t, std::size_t>> grids;  // (p, q) of each pair
  std::size_t output_rows;
  std::size_t output_cols;

  /// Sum of `conv2d(filters[i], channels[i])`, each cropped to the strided
  /// output extent.
  Matrix combine() const;
};

StrideDecomposition destride_layer(const Matrix& h, const Matrix& x, std::size_t stride);

/// Both sides of the sampled-convolution identity
///   sample(conv2d(h, x), (m, n, s))
///     == sum_{p,q} conv2d(sample(zero_pad(h, m-1, n-1), (p, q, s)), sample(x, (p, q, s)))
/// computed independently. Terms of the right side are cropped to the extent
/// of the left side.
struct SampledConvIdentity {
  Matrix lhs;
  Matrix rhs;
};

SampledConvIdentity sampled_conv_identity(const Matrix& h, const Matrix& x, std::size_t m,
                                          std::size_t n, std::size_t s);

/// Where one weight of a rewritten conv layer came from.
struct WeightSource {
  bool padding = true;        // structural zero, no source
  std::size_t out = 0;        // original filter coordinates, 1-based
  std::size_t in = 0;
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const WeightSource&, const WeightSource&) = default;
};

/// Provenance of every stored weight of one rewritten conv layer, in the
/// filter's storage order.
struct LayerTrace {
  std::size_t original_layer;     // 1-based index in the original spec
  std::size_t transformed_layer;  // 1-based index in the rewritten spec
  std::size_t outer_stride;       // sampling applied to the layer's output
  std::size_t inner_stride;       // outer_stride * layer stride
  std::vector<WeightSource> sources;
};

struct TransformOptions {
  /// Stride of the space-to-depth rearrangement applied to the final conv
  /// output. 1 keeps the final map unchanged; larger values rearrange it too
  /// and re-index the first fully-connected layer accordingly.
  std::size_t output_stride = 1;
};

struct TransformResult {
  NetworkSpec spec;
  ChannelMap input_map;
  FlattenPermutation flatten;
  std::vector<LayerTrace> trace;
};

/// Rewrites `spec` into an equivalent network whose convolutions all have
/// stride 1 and whose input is `reshape_input(x, input_map)`.
///
/// Strides are folded backwards from the last conv layer: a layer whose
/// output is later sampled with stride S and which has stride s reads its
/// input rearranged with stride S*s. Output channel (c, m, n) of the new
/// layer holds the (m, n, S) grid of original channel c; input channel
/// (k, p, q) holds the (p, q, S*s) grid of original channel k; their filter
/// is `sample(zero_pad(h[c, k], m'-1, n'-1), (p, q, S*s))` with
/// m' = (m-1)*s + 1, zero-filled at the bottom/right to a common extent.
///
/// Throws DivisibilityError (naming the layer) when a conv input is not a
/// multiple of its rearrangement stride, ShapeError for malformed specs.
TransformResult transform_network(const NetworkSpec& spec, const TransformOptions& options = {});

}  // namespace destride
