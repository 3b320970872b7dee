#include "activations.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace excitnet::net::detail {
namespace {

// exp(x) for x <= 0 by range reduction to [-ln2/2, ln2/2] and a degree-6
// polynomial. Branch free so the calling loops vectorize.
inline float exp_nonpositive(float x) {
  x = x < -87.0f ? -87.0f : x;
  const float n = std::floor(x * 1.44269504088896341f + 0.5f);
  float r = x - n * 0.693359375f;
  r = r - n * -2.12194440e-4f;
  float p = 1.9875691500e-4f;
  p = p * r + 1.3981999507e-3f;
  p = p * r + 8.3334519073e-3f;
  p = p * r + 4.1665795894e-2f;
  p = p * r + 1.6666665459e-1f;
  p = p * r + 5.0000001201e-1f;
  p = p * r * r + r + 1.0f;
  const auto bits = static_cast<std::uint32_t>(static_cast<std::int32_t>(n) + 127) << 23;
  return p * std::bit_cast<float>(bits);
}

}  // namespace

void gate_activations(const float* z, std::size_t n, float* a, float* g, float* u) {
#pragma omp simd
  for (std::size_t k = 0; k < n; ++k) {
    const float x = z[k];
    const float e = exp_nonpositive(-2.0f * std::fabs(x));
    const float t = (1.0f - e) / (1.0f + e);
    a[k] = std::copysign(t, x);
    const float y = z[n + k];
    const float ey = exp_nonpositive(-std::fabs(y));
    const float s = 1.0f / (1.0f + ey);
    g[k] = y >= 0.0f ? s : ey * s;
    u[k] = a[k] * g[k];
  }
}

void gate_activations(const double* z, std::size_t n, double* a, double* g, double* u) {
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = std::tanh(z[k]);
    g[k] = 1.0 / (1.0 + std::exp(-z[n + k]));
    u[k] = a[k] * g[k];
  }
}

}  // namespace excitnet::net::detail
