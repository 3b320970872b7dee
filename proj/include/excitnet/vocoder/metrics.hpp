#pragma once

// Objective quality measures on time-aligned signal pairs. Both signals are
// truncated to the shorter length and framed on the 20 ms / 5 ms grid.

#include <cstdint>
#include <string>
#include <vector>

#include "excitnet/features.hpp"
#include "excitnet/signal.hpp"

namespace excitnet::vocoder {

inline constexpr double kSegSnrFloor = -10.0;
inline constexpr double kSegSnrCeiling = 35.0;
inline constexpr std::size_t kLsdFftSize = 1024;

/// Mean over frames of 10 log10(sum ref^2 / sum (ref - deg)^2), each frame
/// clamped to [-10, 35] dB.
double segmental_snr(const Signal& ref, const Signal& deg, const dsp::FrameGrid& grid = {});

/// Mean over frames of the RMS difference (dB) of Hann-windowed 1024-point
/// log-magnitude spectra.
double log_spectral_distortion(const Signal& ref, const Signal& deg,
                               const dsp::FrameGrid& grid = {});

struct PitchErrors {
  double f0_rmse = 0.0;    // Hz, over frames voiced in both; 0 when there are none
  double vuv_error = 0.0;  // fraction of frames whose voicing decisions differ
};

PitchErrors pitch_errors(const Signal& ref, const Signal& deg,
                         const features::AnalysisConfig& config = {});

struct UtteranceMetrics {
  std::string system;
  std::string utterance;
  double segmental_snr = 0.0;
  double log_spectral_distortion = 0.0;
  double f0_rmse = 0.0;
  double vuv_error = 0.0;
};

/// Per-utterance rows plus per-system means.
struct MetricsReport {
  std::uint64_t seed = 0;
  std::vector<UtteranceMetrics> rows;

  std::vector<std::string> systems() const;
  /// Mean of every metric over the rows of one system.
  UtteranceMetrics mean(const std::string& system) const;

  /// Tab-separated table: one line per utterance, then one "mean" line per system.
  std::string to_tsv() const;
  /// "key=value" lines, e.g. excitnet.segmental_snr=12.5
  std::string to_key_values() const;
};

UtteranceMetrics evaluate_pair(const Signal& ref, const Signal& deg, std::string system = {},
                               std::string utterance = {});

}  // namespace excitnet::vocoder
