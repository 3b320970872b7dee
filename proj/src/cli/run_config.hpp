#pragma once

// Plain-text run configuration: one "key = value" per line, '#' starts a comment.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "excitnet/features.hpp"
#include "excitnet/net/config.hpp"
#include "excitnet/net/generate.hpp"
#include "excitnet/vocoder/vocoder.hpp"

namespace excitnet::cli {

struct RunConfig {
  features::AnalysisConfig analysis;
  net::NetConfig net = net::NetConfig::full();
  vocoder::VocoderKind kind = vocoder::VocoderKind::excitnet;
  std::uint64_t seed = 1;
  std::size_t steps = 1000;
  std::size_t batch_samples = 30000;
  double learning_rate = 1e-4;
  std::size_t checkpoint_every = 0;
  bool sample = false;  // draw from the softmax instead of taking the argmax

  net::SamplingMode sampling_mode() const;
  vocoder::TrainConfig train_config() const;

  /// Checks ranges and cross-field constraints; throws Error naming the key.
  void validate() const;
  /// Canonical "key = value" listing of every field.
  std::string to_text() const;
};

/// Parses configuration text. A "net" preset is applied before the individual
/// network fields regardless of line order. Unknown or repeated keys are errors.
RunConfig parse_run_config(std::string_view text, std::string_view source = "config");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace excitnet::cli
