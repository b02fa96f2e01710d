#include "destride/fixtures.hpp"

#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace destride {

NetworkSpec modified_lenet() {
  return build_network("lenet", {1, 28, 28},
                       {
                           ConvDesc{20, 5, 5, 1},
                           ActivationDesc{},
                           ConvDesc{20, 2, 2, 2},
                           ActivationDesc{},
                           ConvDesc{50, 5, 5, 1},
                           ActivationDesc{},
                           ConvDesc{50, 2, 2, 2},
                           ActivationDesc{},
                           DenseDesc{500},
                           ActivationDesc{},
                       });
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Walks one spatial axis backwards from the final output, choosing kernel
// extents so that each conv input is a multiple of its rearrangement stride.
// Returns the input extent and the kernel extents in forward order.
std::pair<std::size_t, std::vector<std::size_t>> plan_axis(std::mt19937_64& rng, const std::vector<std::size_t>& strides,
                                                           const std::vector<std::size_t>& outer,
                                                           std::size_t max_kernel) {
  std::vector<std::size_t> kernels(strides.size());
  std::size_t extent = pick(rng, 1, 2);
  for (std::size_t j = strides.size(); j-- > 0;) {
    const std::size_t s = strides[j];
    const std::size_t inner = outer[j] * s;
    std::vector<std::pair<std::size_t, std::size_t>> choices;
    for (std::size_t a = 1; a <= max_kernel; ++a)
      for (std::size_t r = 0; r < s; ++r)
        if (((extent - 1) * s + a + r) % inner == 0) choices.emplace_back(a, r);
    if (choices.empty()) throw std::logic_error("no kernel extent satisfies the stride constraints");
    const auto [a, r] = choices[pick(rng, 0, choices.size() - 1)];
    kernels[j] = a;
    extent = (extent - 1) * s + a + r;
  }
  return {extent, std::move(kernels)};
}

}  // namespace

NetworkSpec random_strided_network(std::uint64_t seed, const RandomNetworkOptions& options) {
  std::mt19937_64 rng(seed);
  const std::size_t depth = pick(rng, options.min_convs, options.max_convs);

  std::vector<std::size_t> strides(depth);
  for (auto& s : strides) s = pick(rng, 1, options.max_stride);
  auto product = [&] {
    std::size_t p = 1;
    for (auto s : strides) p *= s;
    return p;
  };
  while (product() > options.max_stride_product) strides[pick(rng, 0, depth - 1)] = 1;

  std::vector<std::size_t> outer(depth);
  for (std::size_t j = depth; j-- > 0;) outer[j] = j + 1 == depth ? 1 : outer[j + 1] * strides[j + 1];

  const auto [height, kh] = plan_axis(rng, strides, outer, options.max_kernel);
  const auto [width, kw] = plan_axis(rng, strides, outer, options.max_kernel);

  std::vector<LayerDesc> layers;
  for (std::size_t j = 0; j < depth; ++j) {
    layers.emplace_back(ConvDesc{pick(rng, 1, options.max_channels), kh[j], kw[j], strides[j]});
    switch (pick(rng, 0, 3)) {
      case 0: break;
      case 1: layers.emplace_back(ActivationDesc{Activation::identity}); break;
      default: layers.emplace_back(ActivationDesc{Activation::relu}); break;
    }
  }
  if (options.allow_dense && pick(rng, 0, 1) == 1) {
    layers.emplace_back(DenseDesc{pick(rng, 1, 4)});
    if (pick(rng, 0, 1) == 1) {
      layers.emplace_back(ActivationDesc{Activation::relu});
      layers.emplace_back(DenseDesc{pick(rng, 1, 3)});
    }
  }
  return build_network("random-" + std::to_string(seed), {pick(rng, 1, options.max_channels), height, width},
                       layers);
}

}  // namespace destride
