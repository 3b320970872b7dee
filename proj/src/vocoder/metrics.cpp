#include "excitnet/vocoder/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <sstream>

namespace excitnet::vocoder {
namespace {

constexpr double kPowerFloor = 1e-10;
constexpr double kEnergyFloor = 1e-20;

// Length of the shorter signal and the number of frames it spans.
std::size_t common_frames(const Signal& ref, const Signal& deg, const dsp::FrameGrid& grid,
                          std::size_t& len) {
  len = std::min(ref.size(), deg.size());
  if (len == 0) throw Error("empty input");
  return dsp::frame_count(len, grid);
}

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class PowerSpectrum {
 public:
  explicit PowerSpectrum(std::size_t n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~PowerSpectrum() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  PowerSpectrum(const PowerSpectrum&) = delete;
  PowerSpectrum& operator=(const PowerSpectrum&) = delete;

  /// 10 log10 of the power spectrum of the zero-padded frame.
  void log_power(std::span<const double> frame, std::vector<double>& db) {
    std::fill(in_, in_ + n_, 0.0);
    std::copy(frame.begin(), frame.end(), in_);
    fftw_execute(plan_);
    db.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < db.size(); ++k) {
      const double p = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
      db[k] = 10.0 * std::log10(std::max(p, kPowerFloor));
    }
  }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

double segmental_snr(const Signal& ref, const Signal& deg, const dsp::FrameGrid& grid) {
  std::size_t len = 0;
  const std::size_t n = common_frames(ref, deg, grid, len);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = i * grid.shift;
    const std::size_t end = std::min(begin + grid.frame_len, len);
    double num = 0.0, den = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const double e = ref.samples[k] - deg.samples[k];
      num += ref.samples[k] * ref.samples[k];
      den += e * e;
    }
    double snr;
    if (den <= kEnergyFloor)
      snr = kSegSnrCeiling;
    else if (num <= kEnergyFloor)
      snr = kSegSnrFloor;
    else
      snr = 10.0 * std::log10(num / den);
    total += std::clamp(snr, kSegSnrFloor, kSegSnrCeiling);
  }
  return total / static_cast<double>(n);
}

double log_spectral_distortion(const Signal& ref, const Signal& deg, const dsp::FrameGrid& grid) {
  std::size_t len = 0;
  const std::size_t n = common_frames(ref, deg, grid, len);
  if (grid.frame_len > kLsdFftSize) throw Error("frame longer than the spectral transform");
  const auto window = dsp::hann_window(grid.frame_len);
  const std::span<const double> x(ref.samples.data(), len), y(deg.samples.data(), len);

  PowerSpectrum fft(kLsdFftSize);
  std::vector<double> fx(grid.frame_len), fy(grid.frame_len), sx, sy;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dsp::extract_frame(x, grid, i, fx);
    dsp::extract_frame(y, grid, i, fy);
    for (std::size_t k = 0; k < grid.frame_len; ++k) {
      fx[k] *= window[k];
      fy[k] *= window[k];
    }
    fft.log_power(fx, sx);
    fft.log_power(fy, sy);
    double acc = 0.0;
    for (std::size_t k = 0; k < sx.size(); ++k) acc += (sx[k] - sy[k]) * (sx[k] - sy[k]);
    total += std::sqrt(acc / static_cast<double>(sx.size()));
  }
  return total / static_cast<double>(n);
}

PitchErrors pitch_errors(const Signal& ref, const Signal& deg,
                         const features::AnalysisConfig& config) {
  const std::size_t len = std::min(ref.size(), deg.size());
  if (len == 0) throw Error("empty input");
  Signal r{{ref.samples.begin(), ref.samples.begin() + static_cast<std::ptrdiff_t>(len)},
           ref.sample_rate};
  Signal d{{deg.samples.begin(), deg.samples.begin() + static_cast<std::ptrdiff_t>(len)},
           deg.sample_rate};
  const auto grid = config.grid();
  const auto fr = features::estimate_f0(r, grid, config);
  const auto fd = features::estimate_f0(d, grid, config);

  PitchErrors out;
  std::size_t voiced = 0, mismatched = 0;
  double sq = 0.0;
  for (std::size_t i = 0; i < fr.size(); ++i) {
    if (fr[i].voiced != fd[i].voiced) ++mismatched;
    if (fr[i].voiced && fd[i].voiced) {
      ++voiced;
      sq += (fr[i].f0 - fd[i].f0) * (fr[i].f0 - fd[i].f0);
    }
  }
  out.f0_rmse = voiced > 0 ? std::sqrt(sq / static_cast<double>(voiced)) : 0.0;
  out.vuv_error = static_cast<double>(mismatched) / static_cast<double>(fr.size());
  return out;
}

UtteranceMetrics evaluate_pair(const Signal& ref, const Signal& deg, std::string system,
                               std::string utterance) {
  if (ref.sample_rate != deg.sample_rate) throw Error("sample rates differ");
  features::AnalysisConfig cfg;
  cfg.sample_rate = ref.sample_rate;
  const auto grid = cfg.grid();
  const auto pitch = pitch_errors(ref, deg, cfg);
  return {std::move(system),
          std::move(utterance),
          segmental_snr(ref, deg, grid),
          log_spectral_distortion(ref, deg, grid),
          pitch.f0_rmse,
          pitch.vuv_error};
}

std::vector<std::string> MetricsReport::systems() const {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), r.system) == out.end()) out.push_back(r.system);
  return out;
}

UtteranceMetrics MetricsReport::mean(const std::string& system) const {
  UtteranceMetrics m{system, "mean"};
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.system != system) continue;
    m.segmental_snr += r.segmental_snr;
    m.log_spectral_distortion += r.log_spectral_distortion;
    m.f0_rmse += r.f0_rmse;
    m.vuv_error += r.vuv_error;
    ++n;
  }
  if (n == 0) throw Error("no rows for system '" + system + "'");
  const auto k = static_cast<double>(n);
  m.segmental_snr /= k;
  m.log_spectral_distortion /= k;
  m.f0_rmse /= k;
  m.vuv_error /= k;
  return m;
}

std::string MetricsReport::to_tsv() const {
  std::ostringstream out;
  out << "system\tutterance\tsegmental_snr_db\tlog_spectral_distortion_db\tf0_rmse_hz\tvuv_error\n";
  auto line = [&](const UtteranceMetrics& m) {
    out << m.system << '\t' << m.utterance << '\t' << format(m.segmental_snr) << '\t'
        << format(m.log_spectral_distortion) << '\t' << format(m.f0_rmse) << '\t'
        << format(m.vuv_error) << '\n';
  };
  for (const auto& r : rows) line(r);
  for (const auto& s : systems()) line(mean(s));
  return out.str();
}

std::string MetricsReport::to_key_values() const {
  std::ostringstream out;
  out << "seed=" << seed << '\n';
  for (const auto& s : systems()) {
    const auto m = mean(s);
    const std::string p = s.empty() ? std::string{} : s + ".";
    out << p << "segmental_snr=" << format(m.segmental_snr) << '\n'
        << p << "log_spectral_distortion=" << format(m.log_spectral_distortion) << '\n'
        << p << "f0_rmse=" << format(m.f0_rmse) << '\n'
        << p << "vuv_error=" << format(m.vuv_error) << '\n';
  }
  return out.str();
}

}  // namespace excitnet::vocoder
