#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace excitnet::net {

inline constexpr int kZeroAmplitudeCode = 128;

/// Hyperparameters of the dilated causal convolution stack (kernel size 2).
struct NetConfig {
  std::uint32_t n_blocks = 2;
  std::uint32_t layers_per_block = 6;
  std::uint32_t residual_channels = 64;
  std::uint32_t gate_channels = 64;
  std::uint32_t skip_channels = 64;
  std::uint32_t head_channels = 64;  // 1x1 width between the skip sum and the softmax
  std::uint32_t n_classes = 256;
  std::uint32_t cond_dim = 79;
  std::uint64_t seed = 1;

  /// 3 blocks x 10 layers, 512 residual/gate channels, 256-wide output head.
  static NetConfig full();
  /// 2 blocks x 6 layers, 64 channels everywhere.
  static NetConfig toy();

  std::size_t n_layers() const { return static_cast<std::size_t>(n_blocks) * layers_per_block; }
  /// 1, 2, 4, ..., 2^(layers_per_block-1), repeated per block.
  std::vector<std::size_t> dilations() const;
  void validate() const;

  bool operator==(const NetConfig&) const = default;
};

/// 1 + n_blocks * sum(dilations) for kernel size 2.
std::size_t receptive_field(const NetConfig& config);

}  // namespace excitnet::net
