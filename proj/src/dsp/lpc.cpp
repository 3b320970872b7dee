#include <cmath>
#include <numbers>

#include "excitnet/dsp.hpp"

namespace excitnet::dsp {

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  return w;
}

std::vector<double> autocorrelation(std::span<const double> frame, std::size_t max_lag,
                                    Window window) {
  const std::size_t n = frame.size();
  if (max_lag >= n) throw Error("autocorrelation lag exceeds frame length");
  std::vector<double> xw(frame.begin(), frame.end());
  if (window == Window::hann) {
    const auto w = hann_window(n);
    for (std::size_t i = 0; i < n; ++i) xw[i] *= w[i];
  }
  std::vector<double> r(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) acc += xw[i] * xw[i + k];
    r[k] = acc;
  }
  return r;
}

LpcFrame levinson_durbin(std::span<const double> r, std::size_t order) {
  if (r.empty() || order > r.size() - 1) throw Error("LPC order exceeds available lags");
  LpcFrame out;
  out.a.assign(order, 0.0);
  out.residual_energy = r[0];
  if (!(r[0] > 0.0)) return out;

  std::vector<double>& a = out.a;
  std::vector<double> prev(order, 0.0);
  double err = r[0];
  for (std::size_t i = 1; i <= order; ++i) {
    double acc = r[i];
    for (std::size_t j = 1; j < i; ++j) acc -= a[j - 1] * r[i - j];
    const double k = acc / err;
    const double next_err = err * (1.0 - k * k);
    // Singular system: keep the lower-order solution.
    if (!(std::abs(k) < 1.0) || !(next_err > 0.0)) break;
    prev.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i - 1));
    for (std::size_t j = 1; j < i; ++j) a[j - 1] = prev[j - 1] - k * prev[i - j - 1];
    a[i - 1] = k;
    err = next_err;
  }
  out.residual_energy = err;
  return out;
}

LpcFrame lpc_from_frame(std::span<const double> frame, std::size_t order) {
  auto r = autocorrelation(frame, order, Window::hann);
  r[0] *= 1.0 + kAutocorrRegularization;
  return levinson_durbin(r, order);
}

std::vector<double> lpc_to_reflection(const LpcFrame& lpc) {
  const std::size_t p = lpc.order();
  std::vector<double> a = lpc.a;
  std::vector<double> k(p, 0.0);
  std::vector<double> tmp(p);
  for (std::size_t m = p; m >= 1; --m) {
    const double km = a[m - 1];
    k[m - 1] = km;
    if (std::abs(km) >= 1.0) {
      // Remaining coefficients are meaningless once the step-down fails.
      for (std::size_t j = 0; j + 1 < m; ++j) k[j] = 0.0;
      break;
    }
    const double denom = 1.0 - km * km;
    for (std::size_t j = 1; j < m; ++j) tmp[j - 1] = (a[j - 1] + km * a[m - j - 1]) / denom;
    for (std::size_t j = 1; j < m; ++j) a[j - 1] = tmp[j - 1];
  }
  return k;
}

bool is_minimum_phase(const LpcFrame& lpc) {
  for (double k : lpc_to_reflection(lpc))
    if (!(std::abs(k) < 1.0)) return false;
  return true;
}

}  // namespace excitnet::dsp
