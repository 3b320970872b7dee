#include <algorithm>
#include <cmath>

#include "excitnet/dsp.hpp"

namespace excitnet {

void validate(const Signal& signal) {
  if (signal.sample_rate <= 0) throw Error("invalid sample rate");
  for (double v : signal.samples)
    if (!std::isfinite(v)) throw Error("signal contains non-finite samples");
}

}  // namespace excitnet

namespace excitnet::dsp {

FrameGrid FrameGrid::from_ms(int sample_rate, double frame_ms, double shift_ms) {
  FrameGrid g;
  g.frame_len = static_cast<std::size_t>(std::lround(sample_rate * frame_ms / 1000.0));
  g.shift = static_cast<std::size_t>(std::lround(sample_rate * shift_ms / 1000.0));
  if (g.shift < 1 || g.frame_len < g.shift) throw Error("invalid frame grid");
  return g;
}

std::size_t frame_count(std::size_t len, const FrameGrid& grid) {
  if (grid.shift < 1 || grid.frame_len < grid.shift) throw Error("invalid frame grid");
  if (len < grid.frame_len) return 1;
  return (len - grid.frame_len) / grid.shift + 1;
}

void extract_frame(std::span<const double> x, const FrameGrid& grid, std::size_t index,
                   std::vector<double>& out) {
  out.assign(grid.frame_len, 0.0);
  const std::size_t begin = index * grid.shift;
  if (begin >= x.size()) return;
  const std::size_t n = std::min(grid.frame_len, x.size() - begin);
  std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(begin), n, out.begin());
}

std::vector<std::vector<double>> frame_signal(const Signal& signal, const FrameGrid& grid) {
  if (signal.empty()) throw Error("empty input");
  const std::size_t n = frame_count(signal.size(), grid);
  std::vector<std::vector<double>> frames(n);
  for (std::size_t i = 0; i < n; ++i) extract_frame(signal.samples, grid, i, frames[i]);
  return frames;
}

}  // namespace excitnet::dsp
