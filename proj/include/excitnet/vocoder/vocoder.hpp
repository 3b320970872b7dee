#pragma once

// ExcitNet and noise-shaped WaveNet pipelines: dataset preparation, training,
// synthesis and LP copy-synthesis.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "excitnet/dsp.hpp"
#include "excitnet/features.hpp"
#include "excitnet/net/checkpoint.hpp"
#include "excitnet/net/generate.hpp"

namespace excitnet::vocoder {

/// excitnet models the LP residual; wavenet_ns models speech whitened by one
/// corpus-level noise-shaping filter.
enum class VocoderKind { excitnet, wavenet_ns };

std::string_view to_string(VocoderKind kind);
VocoderKind parse_kind(std::string_view name);

struct Utterance {
  std::string id;
  Signal signal;
};

struct TrainingExample {
  std::string id;
  std::vector<int> codes;
  Matrix<float> conditions;  // codes.size() x 79, normalized and upsampled
  double scale = 1.0;        // applied before mu-law encoding
};

/// Scale, statistics and noise-filter coefficients are rounded to single
/// precision so that every file format stores them losslessly.
struct PreparedDataset {
  VocoderKind kind = VocoderKind::excitnet;
  features::FeatureStats stats;
  double scale = 1.0;
  std::optional<dsp::NoiseShapingFilter> noise_filter;  // wavenet_ns only
  std::vector<TrainingExample> examples;
  std::vector<features::AcousticFeatureSequence> features;  // unnormalized, one per example
};

struct PrepareOptions {
  features::AnalysisConfig analysis;
  /// Statistics of the training split; computed from the input when absent.
  std::optional<features::FeatureStats> stats;
  /// Corpus scale; 0.99 / max|target| over the input when absent.
  std::optional<double> scale;
  /// Noise-shaping filter for wavenet_ns; derived from the input when absent.
  std::optional<dsp::NoiseShapingFilter> noise_filter;
};

/// Analyzes every utterance and builds mu-law targets and condition matrices.
/// Throws if a target exceeds [-1, 1] after scaling.
PreparedDataset prepare_dataset(std::span<const Utterance> utterances, VocoderKind kind,
                                const PrepareOptions& options = {});

/// Target signal of one utterance before scaling: the LP residual (excitnet)
/// or the noise-shaped speech (wavenet_ns), n_frames * shift samples long.
Signal target_signal(const Signal& aligned_speech, const features::AcousticFeatureSequence& seq,
                     VocoderKind kind, const dsp::NoiseShapingFilter* noise_filter);

/// Condition matrix for a feature stream: normalized, then repeated per sample.
Matrix<float> make_conditions(const features::AcousticFeatureSequence& seq,
                              const features::FeatureStats& stats);

struct TrainConfig {
  net::NetConfig net = net::NetConfig::toy();
  std::size_t steps = 1000;
  std::size_t batch_samples = 4800;  // window length per step, plus receptive-field context
  double learning_rate = 1e-4;
  std::uint64_t seed = 1;  // window sampling
  std::size_t checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::filesystem::path checkpoint_path;
  /// Called after every step with the 1-based step and its pre-update loss.
  std::function<void(std::size_t, double)> on_step;
  /// Called every eval_every steps with the current model; returning true
  /// ends training early.
  std::size_t eval_every = 0;
  std::function<bool(const net::Checkpoint&)> on_eval;
};

/// Trains from scratch. On divergence the last periodic checkpoint (if any)
/// stays on disk and the error names its step.
net::Checkpoint train_vocoder(const PreparedDataset& data, const TrainConfig& config);

/// Attribute and auxiliary-tensor names stored in vocoder checkpoints.
inline constexpr std::string_view kKindAttribute = "vocoder.kind";
inline constexpr std::string_view kScaleTensor = "vocoder.scale";
inline constexpr std::string_view kStatsMeanTensor = "vocoder.stats.mean";
inline constexpr std::string_view kStatsStdTensor = "vocoder.stats.std";
inline constexpr std::string_view kNoiseLpcTensor = "vocoder.noise_lpc";

/// Records kind, scale, statistics and the noise filter in `ckpt`.
void attach_metadata(net::Checkpoint& ckpt, const PreparedDataset& data);

struct VocoderMetadata {
  VocoderKind kind;
  double scale;
  features::FeatureStats stats;
  std::optional<dsp::NoiseShapingFilter> noise_filter;
};

VocoderMetadata read_metadata(const net::Checkpoint& ckpt);

/// Generates a waveform of n_frames * shift samples for `features`
/// (unnormalized). Throws "vocoder kind mismatch" if the checkpoint was
/// trained for another kind.
Signal synthesize(const net::Checkpoint& ckpt, const features::AcousticFeatureSequence& features,
                  VocoderKind kind, const net::SamplingMode& mode);

struct CopySynthesisOptions {
  features::AnalysisConfig analysis;
  bool quantize = false;
  int n_classes = 256;
};

/// Analysis, LP residual, optional mu-law round trip at scale 0.99 / max|e|,
/// and LP synthesis from the same LSFs. Output has n_frames * shift samples.
Signal copy_synthesis(const Signal& signal, const CopySynthesisOptions& options = {});

// Prepared-dataset file "EXND": magic | u32 version | u8 kind | f32 scale
// | stats (79 f32 mean, 79 f32 std) | u8 has_filter [, u32 order, f32 a[order]]
// | u32 n_examples, (string id, u32 sample_rate, u32 frame_len, u32 shift,
//   u32 n_frames, f32 features[n_frames x 79], u32 n_codes, u8 codes[n_codes])*
// | u32 CRC-32 of every preceding byte. Conditions are rebuilt on load.
void save_dataset(const std::filesystem::path& path, const PreparedDataset& data);
PreparedDataset load_dataset(const std::filesystem::path& path);

}  // namespace excitnet::vocoder
