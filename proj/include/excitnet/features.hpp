#pragma once

// 79-dimensional conditioning features: [lsf(40) | sew(32) | rew(4) | log_f0 | gain | vuv].

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "excitnet/dsp.hpp"
#include "excitnet/signal.hpp"

namespace excitnet::features {

inline constexpr std::size_t kLsfDim = 40;
inline constexpr std::size_t kSewDim = 32;
inline constexpr std::size_t kRewDim = 4;
inline constexpr std::size_t kFeatureDim = kLsfDim + kSewDim + kRewDim + 3;

inline constexpr std::size_t kLsfOffset = 0;
inline constexpr std::size_t kSewOffset = kLsfOffset + kLsfDim;
inline constexpr std::size_t kRewOffset = kSewOffset + kSewDim;
inline constexpr std::size_t kLogF0Index = kRewOffset + kRewDim;
inline constexpr std::size_t kGainIndex = kLogF0Index + 1;
inline constexpr std::size_t kVuvIndex = kGainIndex + 1;

inline constexpr double kGainEnergyFloor = 1e-10;
inline constexpr double kStdFloor = 1e-8;

using FeatureVector = std::array<double, kFeatureDim>;

struct AcousticFrame {
  FeatureVector values{};

  std::span<double, kLsfDim> lsf() { return std::span(values).subspan<kLsfOffset, kLsfDim>(); }
  std::span<const double, kLsfDim> lsf() const {
    return std::span(values).subspan<kLsfOffset, kLsfDim>();
  }
  std::span<double, kSewDim> sew() { return std::span(values).subspan<kSewOffset, kSewDim>(); }
  std::span<const double, kSewDim> sew() const {
    return std::span(values).subspan<kSewOffset, kSewDim>();
  }
  std::span<double, kRewDim> rew() { return std::span(values).subspan<kRewOffset, kRewDim>(); }
  std::span<const double, kRewDim> rew() const {
    return std::span(values).subspan<kRewOffset, kRewDim>();
  }
  double& log_f0() { return values[kLogF0Index]; }
  double log_f0() const { return values[kLogF0Index]; }
  double& gain() { return values[kGainIndex]; }
  double gain() const { return values[kGainIndex]; }
  double& vuv() { return values[kVuvIndex]; }
  double vuv() const { return values[kVuvIndex]; }

  bool operator==(const AcousticFrame&) const = default;
};

struct AcousticFeatureSequence {
  std::vector<AcousticFrame> frames;
  int sample_rate = kDefaultSampleRate;
  std::size_t frame_len = 480;
  std::size_t shift = 120;

  std::size_t size() const { return frames.size(); }
  dsp::FrameGrid grid() const { return {frame_len, shift}; }
  bool operator==(const AcousticFeatureSequence&) const = default;
};

struct FeatureStats {
  std::array<double, kFeatureDim> mean{};
  std::array<double, kFeatureDim> std{};

  bool operator==(const FeatureStats&) const = default;
};

struct AnalysisConfig {
  int sample_rate = kDefaultSampleRate;
  double frame_ms = 20.0;
  double shift_ms = 5.0;
  std::size_t lpc_order = kLsfDim;
  double f0_min = 60.0;
  double f0_max = 400.0;
  double voicing_threshold = 0.3;

  dsp::FrameGrid grid() const { return dsp::FrameGrid::from_ms(sample_rate, frame_ms, shift_ms); }
};

struct F0Estimate {
  double f0 = 0.0;  // Hz; f0_min on unvoiced frames
  bool voiced = false;
};

/// Normalized-autocorrelation pitch tracker on the frame grid. Each frame is
/// correlated against the following max_lag samples so every lag uses
/// frame_len products.
std::vector<F0Estimate> estimate_f0(const Signal& signal, const dsp::FrameGrid& grid,
                                    const AnalysisConfig& config = {});

/// 0.5 * ln(max(mean(x^2), 1e-10))
double compute_gain(std::span<const double> frame);

struct SewRew {
  std::array<double, kSewDim> sew{};
  std::array<double, kRewDim> rew{};
};

/// Pitch-synchronous characteristic-waveform decomposition of the excitation.
/// Each frame contributes one cycle (length sample_rate / f0, or shift samples
/// when unvoiced) centred on the frame, described by the first 16 harmonics of
/// its Fourier series after phase alignment on the fundamental and RMS
/// normalization: [Re h1..h16 | Im h2..h17]. SEW is the +-2 frame moving
/// average of that track; REW is the first four dimensions of the remainder.
std::vector<SewRew> extract_sew_rew(const Signal& excitation, std::span<const F0Estimate> f0,
                                    const dsp::FrameGrid& grid);

/// Characteristic waveform of a single cycle (exposed for tests).
std::array<double, kSewDim> characteristic_waveform(std::span<const double> cycle);

/// Full extraction chain. Feature values are rounded to single precision so the
/// on-disk representation is lossless.
AcousticFeatureSequence analyze(const Signal& signal, const AnalysisConfig& config = {});

/// Per-frame LP coefficients rebuilt from the LSFs carried by a feature stream.
std::vector<dsp::LpcFrame> lpc_track(const AcousticFeatureSequence& seq);

/// Signal truncated (or zero-extended) to n_frames * shift samples.
Signal align_to_frames(const Signal& signal, std::size_t n_frames, std::size_t shift);

FeatureStats compute_stats(std::span<const AcousticFeatureSequence> sequences);
AcousticFeatureSequence normalize(const AcousticFeatureSequence& seq, const FeatureStats& stats);
AcousticFeatureSequence denormalize(const AcousticFeatureSequence& seq,
                                    const FeatureStats& stats);

/// Row n is frame floor(n / shift); n_frames * shift rows.
Matrix<float> upsample_features(const AcousticFeatureSequence& seq, std::size_t shift);

// EXNF / EXNS files
void write_features(const std::filesystem::path& path, const AcousticFeatureSequence& seq);
AcousticFeatureSequence read_features(const std::filesystem::path& path);
void write_stats(const std::filesystem::path& path, const FeatureStats& stats);
FeatureStats read_stats(const std::filesystem::path& path);

}  // namespace excitnet::features
