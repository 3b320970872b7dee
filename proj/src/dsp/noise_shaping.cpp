#include <vector>

#include "excitnet/dsp.hpp"

namespace excitnet::dsp {
namespace {

Signal constant_track(const Signal& x, const NoiseShapingFilter& filter, bool synthesis) {
  // A single frame spanning the whole signal turns the frame-duplicated filters
  // into time-invariant ones.
  if (x.empty()) return x;
  const LpcFrame track[] = {filter.lpc};
  return synthesis ? lp_synthesis(x, track, x.size()) : lp_analysis(x, track, x.size());
}

}  // namespace

NoiseShapingFilter derive_noise_shaping_filter(std::span<const Signal> corpus,
                                               const FrameGrid& grid, std::size_t order) {
  if (corpus.empty()) throw Error("empty corpus");
  std::vector<double> avg(order + 1, 0.0);
  std::size_t n_frames = 0;
  std::vector<double> frame;
  for (const auto& utt : corpus) {
    if (utt.empty()) continue;
    const std::size_t n = frame_count(utt.size(), grid);
    for (std::size_t i = 0; i < n; ++i) {
      extract_frame(utt.samples, grid, i, frame);
      const auto r = autocorrelation(frame, order, Window::hann);
      for (std::size_t k = 0; k <= order; ++k) avg[k] += r[k];
    }
    n_frames += n;
  }
  if (n_frames == 0 || !(avg[0] > 0.0)) throw Error("noise-shaping corpus is silent");
  for (auto& v : avg) v /= static_cast<double>(n_frames);
  avg[0] *= 1.0 + kAutocorrRegularization;
  return {levinson_durbin(avg, order)};
}

Signal apply_noise_shaping(const Signal& signal, const NoiseShapingFilter& filter) {
  return constant_track(signal, filter, false);
}

Signal invert_noise_shaping(const Signal& signal, const NoiseShapingFilter& filter) {
  return constant_track(signal, filter, true);
}

}  // namespace excitnet::dsp
