#include <cmath>
#include <limits>

#include "excitnet/features.hpp"
#include "excitnet/log.hpp"

namespace excitnet::features {
namespace {

constexpr double kBandwidthExpansion = 0.994;

double to_float_precision(double v) { return static_cast<double>(static_cast<float>(v)); }

dsp::LsfFrame robust_lsf(dsp::LpcFrame lpc) {
  try {
    return dsp::lpc_to_lsf(lpc);
  } catch (const Error&) {
    double g = 1.0;
    for (auto& a : lpc.a) a *= (g *= kBandwidthExpansion);
    log::warn("LSF conversion retried with bandwidth expansion");
    return dsp::lpc_to_lsf(lpc);
  }
}

}  // namespace

Signal align_to_frames(const Signal& signal, std::size_t n_frames, std::size_t shift) {
  Signal out{signal.samples, signal.sample_rate};
  out.samples.resize(n_frames * shift, 0.0);
  return out;
}

std::vector<dsp::LpcFrame> lpc_track(const AcousticFeatureSequence& seq) {
  std::vector<dsp::LpcFrame> track(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto lsf = seq.frames[i].lsf();
    track[i] = dsp::lsf_to_lpc({std::vector<double>(lsf.begin(), lsf.end())});
  }
  return track;
}

AcousticFeatureSequence analyze(const Signal& signal, const AnalysisConfig& config) {
  if (signal.empty()) throw Error("empty input");
  validate(signal);
  if (signal.sample_rate != config.sample_rate)
    throw Error("sample rate " + std::to_string(signal.sample_rate) + " does not match " +
                std::to_string(config.sample_rate));
  if (config.lpc_order != kLsfDim) throw Error("feature layout requires LPC order 40");

  const auto grid = config.grid();
  const std::size_t n = dsp::frame_count(signal.size(), grid);
  AcousticFeatureSequence seq;
  seq.sample_rate = signal.sample_rate;
  seq.frame_len = grid.frame_len;
  seq.shift = grid.shift;
  seq.frames.resize(n);

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> frame;
    dsp::extract_frame(signal.samples, grid, i, frame);
    const auto lsf = robust_lsf(dsp::lpc_from_frame(frame, config.lpc_order));
    auto dst = seq.frames[i].lsf();
    for (std::size_t k = 0; k < kLsfDim; ++k) {
      double w = to_float_precision(lsf.w[k]);
      if (k > 0 && !(w > dst[k - 1]))
        w = std::nextafter(static_cast<float>(dst[k - 1]), std::numeric_limits<float>::max());
      dst[k] = w;
    }
    seq.frames[i].gain() = to_float_precision(compute_gain(frame));
  }

  const auto f0 = estimate_f0(signal, grid, config);

  // Excitation over every sample the characteristic-waveform cycles may touch:
  // the frame-duplicated track extended with the last frame.
  auto track = lpc_track(seq);
  const std::size_t covered = (signal.size() + grid.shift - 1) / grid.shift;
  while (track.size() < covered) track.push_back(track.back());
  const auto excitation =
      dsp::lp_analysis(align_to_frames(signal, track.size(), grid.shift), track, grid.shift);
  const auto sr = extract_sew_rew(excitation, f0, grid);

  for (std::size_t i = 0; i < n; ++i) {
    auto& fr = seq.frames[i];
    for (std::size_t k = 0; k < kSewDim; ++k) fr.sew()[k] = to_float_precision(sr[i].sew[k]);
    for (std::size_t k = 0; k < kRewDim; ++k) fr.rew()[k] = to_float_precision(sr[i].rew[k]);
    fr.log_f0() = to_float_precision(std::log(f0[i].voiced ? f0[i].f0 : config.f0_min));
    fr.vuv() = f0[i].voiced ? 1.0 : 0.0;
  }
  return seq;
}

}  // namespace excitnet::features
