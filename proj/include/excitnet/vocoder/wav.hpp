#pragma once

// RIFF/WAVE PCM16 mono reading and writing.

#include <filesystem>

#include "excitnet/signal.hpp"

namespace excitnet::vocoder {

/// Reads a 16-bit PCM mono file. Any other layout is an error naming the file.
Signal read_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono, clipping to [-1, 1). The file is replaced atomically.
void write_wav(const std::filesystem::path& path, const Signal& signal);

/// Linear-interpolation resampler.
Signal resample_linear(const Signal& signal, int sample_rate);

}  // namespace excitnet::vocoder
