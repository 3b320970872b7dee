#pragma once

#include <cstddef>

namespace excitnet::net::detail {

/// a = tanh(z[0..n)), g = sigmoid(z[n..2n)), u = a * g. The float version uses
/// a vectorizable exp with about 2 ulp error; forward and incremental
/// generation share this one definition so their results agree bitwise.
void gate_activations(const float* z, std::size_t n, float* a, float* g, float* u);
void gate_activations(const double* z, std::size_t n, double* a, double* g, double* u);

template <typename T>
inline void fill_rows(T* dst, std::size_t rows, const T* bias, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) dst[r * cols + c] = bias[c];
}

template <typename T>
inline void add_column_sums(const T* src, std::size_t rows, std::size_t cols, T* acc) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) acc[c] += src[r * cols + c];
}

}  // namespace excitnet::net::detail
