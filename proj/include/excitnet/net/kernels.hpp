#pragma once

// Dense kernels behind the network. All matrices are row-major and contiguous.
//
//   gemm_acc     Y[rows][out] += X[rows][in] * W[in][out]
//   gemm_nt_acc  dX[rows][in] += dY[rows][out] * W[in][out]^T
//   gemm_tn_acc  dW[in][out]  += X[rows][in]^T * dY[rows][out]
//
// The default versions split work across OpenMP threads; every output element
// is still reduced by a single thread in a fixed order, so results do not
// depend on the thread count. The `serial` namespace holds plain triple-loop
// references used by the tests and the benchmark.

#include <cstddef>

namespace excitnet::net::kernels {

template <typename T>
void gemm_acc(const T* x, std::size_t rows, std::size_t in, const T* w, std::size_t out, T* y);

template <typename T>
void gemm_nt_acc(const T* dy, std::size_t rows, std::size_t out, const T* w, std::size_t in,
                 T* dx);

template <typename T>
void gemm_tn_acc(const T* x, std::size_t rows, std::size_t in, const T* dy, std::size_t out,
                 T* dw);

/// Single-row Y += x * W with the same per-element operation order as gemm_acc.
template <typename T>
void row_acc(const T* x, std::size_t in, const T* w, std::size_t out, T* y);

namespace serial {

template <typename T>
void gemm_acc(const T* x, std::size_t rows, std::size_t in, const T* w, std::size_t out, T* y);

template <typename T>
void gemm_nt_acc(const T* dy, std::size_t rows, std::size_t out, const T* w, std::size_t in,
                 T* dx);

template <typename T>
void gemm_tn_acc(const T* x, std::size_t rows, std::size_t in, const T* dy, std::size_t out,
                 T* dw);

}  // namespace serial

/// Threads used by the parallel kernels (0 = OpenMP default).
void set_num_threads(int n);
int num_threads();

}  // namespace excitnet::net::kernels
