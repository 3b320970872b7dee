#include <cmath>
#include <complex>
#include <numbers>

#include "excitnet/features.hpp"

namespace excitnet::features {
namespace {

constexpr std::size_t kHarmonics = kSewDim / 2;
constexpr int kSmoothingRadius = 2;

}  // namespace

std::array<double, kSewDim> characteristic_waveform(std::span<const double> cycle) {
  std::array<double, kSewDim> cw{};
  const std::size_t len = cycle.size();
  if (len == 0) return cw;
  double energy = 0.0;
  for (double v : cycle) energy += v * v;
  const double rms = std::sqrt(energy / static_cast<double>(len));
  if (rms < 1e-12) return cw;

  std::vector<std::complex<double>> twiddle(len);
  for (std::size_t m = 0; m < len; ++m)
    twiddle[m] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) /
                                     static_cast<double>(len));

  // Harmonics 1 .. kHarmonics + 1 of the cycle's Fourier series.
  std::array<std::complex<double>, kHarmonics + 2> h{};
  for (std::size_t k = 1; k <= kHarmonics + 1; ++k) {
    std::complex<double> acc{};
    for (std::size_t n = 0; n < len; ++n) acc += cycle[n] * twiddle[(k * n) % len];
    h[k] = acc / (static_cast<double>(len) * rms);
  }

  // Align the phase of the fundamental to zero (a circular time shift of the cycle).
  const double phi = std::abs(h[1]) > 1e-12 ? std::arg(h[1]) : 0.0;
  for (std::size_t k = 1; k <= kHarmonics + 1; ++k)
    h[k] *= std::polar(1.0, -static_cast<double>(k) * phi);

  for (std::size_t k = 0; k < kHarmonics; ++k) {
    cw[k] = h[k + 1].real();
    cw[kHarmonics + k] = h[k + 2].imag();
  }
  return cw;
}

std::vector<SewRew> extract_sew_rew(const Signal& excitation, std::span<const F0Estimate> f0,
                                    const dsp::FrameGrid& grid) {
  const std::size_t n = f0.size();
  const auto& x = excitation.samples;
  std::vector<std::array<double, kSewDim>> cw(n);

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len =
        f0[i].voiced ? static_cast<std::size_t>(std::lround(excitation.sample_rate / f0[i].f0))
                     : grid.shift;
    const auto center = static_cast<std::ptrdiff_t>(i * grid.shift + grid.frame_len / 2);
    const std::ptrdiff_t begin = center - static_cast<std::ptrdiff_t>(len / 2);
    std::vector<double> cycle(len, 0.0);
    for (std::size_t m = 0; m < len; ++m) {
      const std::ptrdiff_t idx = begin + static_cast<std::ptrdiff_t>(m);
      if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(x.size()))
        cycle[m] = x[static_cast<std::size_t>(idx)];
    }
    cw[i] = characteristic_waveform(cycle);
  }

  std::vector<SewRew> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= kSmoothingRadius ? i - kSmoothingRadius : 0;
    const std::size_t hi = std::min(n - 1, i + kSmoothingRadius);
    auto& sew = out[i].sew;
    for (std::size_t j = lo; j <= hi; ++j)
      for (std::size_t d = 0; d < kSewDim; ++d) sew[d] += cw[j][d];
    for (auto& v : sew) v /= static_cast<double>(hi - lo + 1);
    for (std::size_t d = 0; d < kRewDim; ++d) out[i].rew[d] = cw[i][d] - sew[d];
  }
  return out;
}

}  // namespace excitnet::features
