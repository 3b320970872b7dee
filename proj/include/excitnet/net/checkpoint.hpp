#pragma once

// EXNM checkpoint files:
//   "EXNM" | u32 version | NetConfig (u32 x 8, u64 seed) | u64 step
//   | u32 n_attributes, (string key, string value)*
//   | u32 n_tensors, (string name, u32 rank, u32 dims[rank], f32 data[])*
//   | u8 has_adam [, u64 adam_step, u32 n, tensors m.*, then v.*]
//   | u32 CRC-32 of every preceding byte.
// Strings are u32 length + bytes; everything little-endian.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "excitnet/net/params.hpp"
#include "excitnet/net/train.hpp"

namespace excitnet::net {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetParams<float> params;
  std::optional<AdamState<float>> adam;
  std::uint64_t step = 0;
  std::map<std::string, std::string> attributes;
  /// Extra named tensors stored alongside the weights (names must not clash
  /// with parameter names).
  std::vector<Tensor<float>> aux;

  const NetConfig& config() const { return params.config; }
  const Tensor<float>* find_aux(const std::string& name) const;
  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace excitnet::net
