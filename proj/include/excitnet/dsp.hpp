#pragma once

// Signal-processing kernels shared by feature extraction and the vocoders.
//
// Predictor convention everywhere: A(z) = 1 - sum_k a_k z^-k, so the residual
// is e[n] = x[n] - sum_k a_k x[n-k].

#include <cstddef>
#include <span>
#include <vector>

#include "excitnet/signal.hpp"

namespace excitnet::dsp {

inline constexpr std::size_t kDefaultLpcOrder = 40;
inline constexpr double kAutocorrRegularization = 1e-6;

struct LpcFrame {
  std::vector<double> a;        // a_1 .. a_p
  double residual_energy = 0.0;

  std::size_t order() const { return a.size(); }
};

struct LsfFrame {
  std::vector<double> w;  // radians, strictly increasing in (0, pi)

  std::size_t order() const { return w.size(); }
};

// ---------------------------------------------------------------------------
// Framing

struct FrameGrid {
  std::size_t frame_len = 480;
  std::size_t shift = 120;

  static FrameGrid from_ms(int sample_rate, double frame_ms, double shift_ms);
};

/// floor((len - frame_len) / shift) + 1, or 1 when the signal is shorter than a frame.
std::size_t frame_count(std::size_t len, const FrameGrid& grid);

/// Frame i covers [i*shift, i*shift + frame_len); samples past the end are zero.
std::vector<std::vector<double>> frame_signal(const Signal& signal, const FrameGrid& grid);

/// Copies frame `index` into `out` (resized to frame_len), zero-padding past the end.
void extract_frame(std::span<const double> x, const FrameGrid& grid, std::size_t index,
                   std::vector<double>& out);

// ---------------------------------------------------------------------------
// LP analysis

enum class Window { rectangular, hann };

std::vector<double> hann_window(std::size_t n);

/// r[k] = sum_n xw[n] xw[n+k] for k = 0..max_lag, xw the windowed frame.
std::vector<double> autocorrelation(std::span<const double> frame, std::size_t max_lag,
                                    Window window = Window::hann);

/// Solves the Yule-Walker equations for the given order. r[0] <= 0 yields the
/// zero predictor. The recursion stops early (higher coefficients zero) if the
/// prediction error collapses.
LpcFrame levinson_durbin(std::span<const double> r, std::size_t order);

/// Hann window, autocorrelation, r[0] *= 1 + 1e-6, Levinson-Durbin.
LpcFrame lpc_from_frame(std::span<const double> frame, std::size_t order);

/// Reflection coefficients via the step-down recursion; |k| < 1 for all
/// entries iff A(z) is minimum phase.
std::vector<double> lpc_to_reflection(const LpcFrame& lpc);
bool is_minimum_phase(const LpcFrame& lpc);

// ---------------------------------------------------------------------------
// Line spectral frequencies

LsfFrame lpc_to_lsf(const LpcFrame& lpc);
LpcFrame lsf_to_lpc(const LsfFrame& lsf);

// ---------------------------------------------------------------------------
// Frame-duplicated LP filtering. lpc_per_frame[i] applies to samples
// [i*shift, (i+1)*shift); the signal length must be n_frames * shift.

Signal lp_analysis(const Signal& signal, std::span<const LpcFrame> lpc_per_frame,
                   std::size_t shift);
Signal lp_synthesis(const Signal& excitation, std::span<const LpcFrame> lpc_per_frame,
                    std::size_t shift);

// ---------------------------------------------------------------------------
// mu-law companding

class MuLaw {
 public:
  explicit MuLaw(double mu = 255.0, int n_classes = 256);

  int encode(double x) const;
  double decode(int code) const;

  double mu() const { return mu_; }
  int n_classes() const { return n_classes_; }

 private:
  double mu_;
  int n_classes_;
  double log1p_mu_;
};

int mu_law_encode(double x, double mu = 255.0);
double mu_law_decode(int code, double mu = 255.0);

// ---------------------------------------------------------------------------
// Time-invariant noise shaping for the WaveNet baseline

struct NoiseShapingFilter {
  LpcFrame lpc;
};

NoiseShapingFilter derive_noise_shaping_filter(std::span<const Signal> corpus,
                                               const FrameGrid& grid = {},
                                               std::size_t order = kDefaultLpcOrder);
Signal apply_noise_shaping(const Signal& signal, const NoiseShapingFilter& filter);
Signal invert_noise_shaping(const Signal& signal, const NoiseShapingFilter& filter);

}  // namespace excitnet::dsp
