#include <algorithm>
#include <cmath>

#include "excitnet/features.hpp"

namespace excitnet::features {
namespace {

constexpr double kSilenceEnergy = 1e-10;
constexpr double kOctaveRatio = 0.9;

F0Estimate estimate_frame(std::span<const double> x, std::size_t begin, std::size_t frame_len,
                          std::size_t min_lag, std::size_t max_lag, int sample_rate,
                          const AnalysisConfig& cfg) {
  const F0Estimate unvoiced{cfg.f0_min, false};
  const std::size_t span_len = frame_len + max_lag + 2;
  std::vector<double> seg(span_len, 0.0);
  if (begin < x.size())
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(begin),
                std::min(span_len, x.size() - begin), seg.begin());

  double e0 = 0.0;
  for (std::size_t n = 0; n < frame_len; ++n) e0 += seg[n] * seg[n];
  if (e0 / static_cast<double>(frame_len) < kSilenceEnergy) return unvoiced;

  // rho[j] holds lag min_lag - 1 + j so parabolic interpolation has both neighbours.
  const std::size_t lo = min_lag - 1, hi = max_lag + 1;
  std::vector<double> rho(hi - lo + 1, 0.0);
  for (std::size_t lag = lo; lag <= hi; ++lag) {
    double num = 0.0, el = 0.0;
    for (std::size_t n = 0; n < frame_len; ++n) {
      num += seg[n] * seg[n + lag];
      el += seg[n + lag] * seg[n + lag];
    }
    rho[lag - lo] = el > 0.0 ? num / std::sqrt(e0 * el) : 0.0;
  }

  double best = -1.0;
  for (std::size_t lag = min_lag; lag <= max_lag; ++lag) best = std::max(best, rho[lag - lo]);
  if (best < cfg.voicing_threshold) return unvoiced;

  // Shortest lag whose local peak is close to the global maximum; guards
  // against picking a multiple of the period.
  std::size_t pick = max_lag + 1;
  for (std::size_t lag = min_lag; lag <= max_lag; ++lag) {
    const double r = rho[lag - lo];
    if (r >= kOctaveRatio * best && r >= rho[lag - lo - 1] && r >= rho[lag - lo + 1]) {
      pick = lag;
      break;
    }
  }
  if (pick > max_lag) return unvoiced;

  const double rm = rho[pick - lo - 1], r0 = rho[pick - lo], rp = rho[pick - lo + 1];
  const double denom = rm - 2.0 * r0 + rp;
  double delta = denom < 0.0 ? 0.5 * (rm - rp) / denom : 0.0;
  delta = std::clamp(delta, -0.5, 0.5);
  const double f0 = sample_rate / (static_cast<double>(pick) + delta);
  return {std::clamp(f0, cfg.f0_min, cfg.f0_max), true};
}

}  // namespace

std::vector<F0Estimate> estimate_f0(const Signal& signal, const dsp::FrameGrid& grid,
                                    const AnalysisConfig& cfg) {
  if (signal.empty()) throw Error("empty input");
  if (signal.sample_rate < 2.0 * cfg.f0_max) throw Error("sample rate too low for F0 search");
  const auto min_lag = static_cast<std::size_t>(std::floor(signal.sample_rate / cfg.f0_max));
  const auto max_lag = static_cast<std::size_t>(std::ceil(signal.sample_rate / cfg.f0_min));
  if (min_lag < 2) throw Error("F0 search range too high for the sample rate");

  const std::size_t n = dsp::frame_count(signal.size(), grid);
  std::vector<F0Estimate> out(n);
  const std::span<const double> x(signal.samples);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i)
    out[i] = estimate_frame(x, i * grid.shift, grid.frame_len, min_lag, max_lag,
                            signal.sample_rate, cfg);
  return out;
}

double compute_gain(std::span<const double> frame) {
  double e = 0.0;
  for (double v : frame) e += v * v;
  const double mean = frame.empty() ? 0.0 : e / static_cast<double>(frame.size());
  return 0.5 * std::log(std::max(mean, kGainEnergyFloor));
}

}  // namespace excitnet::features
