#include <cmath>
#include <string>

#include "excitnet/dsp.hpp"
#include "excitnet/log.hpp"

namespace excitnet::dsp {
namespace {

void check_track(std::size_t len, std::span<const LpcFrame> track, std::size_t shift) {
  if (shift < 1) throw Error("invalid shift");
  if (len != track.size() * shift)
    throw Error("frame/length mismatch: " + std::to_string(len) + " samples vs " +
                std::to_string(track.size()) + " frames of " + std::to_string(shift));
}

double predict(const std::vector<double>& x, std::size_t n, const std::vector<double>& a) {
  double s = 0.0;
  const std::size_t p = std::min(a.size(), n);
  for (std::size_t k = 1; k <= p; ++k) s += a[k - 1] * x[n - k];
  return s;
}

}  // namespace

Signal lp_analysis(const Signal& signal, std::span<const LpcFrame> lpc_per_frame,
                   std::size_t shift) {
  check_track(signal.size(), lpc_per_frame, shift);
  Signal out{std::vector<double>(signal.size()), signal.sample_rate};
  const auto& x = signal.samples;
  for (std::size_t n = 0; n < x.size(); ++n)
    out.samples[n] = x[n] - predict(x, n, lpc_per_frame[n / shift].a);
  return out;
}

Signal lp_synthesis(const Signal& excitation, std::span<const LpcFrame> lpc_per_frame,
                    std::size_t shift) {
  check_track(excitation.size(), lpc_per_frame, shift);
  std::size_t unstable = 0;
  for (const auto& f : lpc_per_frame)
    if (!is_minimum_phase(f)) ++unstable;
  if (unstable > 0)
    log::warn("lp_synthesis: " + std::to_string(unstable) +
              " non-minimum-phase frame(s); output may grow");

  Signal out{std::vector<double>(excitation.size()), excitation.sample_rate};
  auto& x = out.samples;
  for (std::size_t n = 0; n < x.size(); ++n) {
    x[n] = excitation.samples[n] + predict(x, n, lpc_per_frame[n / shift].a);
    if (!std::isfinite(x[n])) throw Error("synthesis diverged");
  }
  return out;
}

}  // namespace excitnet::dsp
