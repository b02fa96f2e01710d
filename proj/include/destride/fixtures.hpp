#pragma once

#include <cstdint>

#include "destride/network.hpp"

namespace destride {

/// LeNet with pooling replaced by stride-2 convolutions: 1x28x28 input,
/// 5x5 conv 20, 2x2 conv 20 stride 2, 5x5 conv 50, 2x2 conv 50 stride 2,
/// fc 500, ReLU after every layer. Weights are zero.
NetworkSpec modified_lenet();

struct RandomNetworkOptions {
  std::size_t min_convs = 1;
  std::size_t max_convs = 4;
  std::size_t max_stride = 3;
  std::size_t max_stride_product = 8;  // bounds the size of the rewritten network
  std::size_t max_kernel = 5;
  std::size_t max_channels = 3;
  bool allow_dense = true;
};

/// Random all-convolutional network whose every conv input is a multiple of
/// the stride it will be rearranged with, so `transform_network` accepts it.
/// Kernels may be rectangular; activations and a dense tail are optional.
/// Weights are zero.
NetworkSpec random_strided_network(std::uint64_t seed, const RandomNetworkOptions& options = {});

}  // namespace destride
