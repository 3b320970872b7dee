#include "excitnet/net/kernels.hpp"

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace excitnet::net::kernels {
namespace {

// Below this many multiply-adds the parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 16;
// Depth block for the transposed product: keeps a slab of dY in L2.
constexpr std::size_t kDepthBlock = 256;

bool go_parallel(std::size_t work) { return work >= kParallelThreshold && num_threads() > 1; }

template <typename T>
struct Tile;
template <>
struct Tile<float> {
  static constexpr std::size_t rows = 4, cols = 64;
};
template <>
struct Tile<double> {
  static constexpr std::size_t rows = 4, cols = 32;
};

// C[r][j] += sum_k A[r * ars + k * aks] * B[k * ldb + j] for an MR x width
// block, accumulated in registers in ascending k. Every path below performs
// the same per-element sequence, so the result does not depend on how rows
// and columns are split into tiles.
template <typename T, std::size_t MR, std::size_t NR>
inline void tile(const T* a, std::size_t ars, std::size_t aks, const T* b, std::size_t ldb, T* c,
                 std::size_t ldc, std::size_t depth) {
  T acc[MR][NR];
  for (std::size_t r = 0; r < MR; ++r)
    for (std::size_t j = 0; j < NR; ++j) acc[r][j] = c[r * ldc + j];
  for (std::size_t k = 0; k < depth; ++k) {
    const T* bk = b + k * ldb;
    for (std::size_t r = 0; r < MR; ++r) {
      const T ar = a[r * ars + k * aks];
#pragma omp simd
      for (std::size_t j = 0; j < NR; ++j) acc[r][j] += ar * bk[j];
    }
  }
  for (std::size_t r = 0; r < MR; ++r)
    for (std::size_t j = 0; j < NR; ++j) c[r * ldc + j] = acc[r][j];
}

template <typename T, std::size_t MR, std::size_t NR>
inline void tile_edge(const T* a, std::size_t ars, std::size_t aks, const T* b, std::size_t ldb,
                      T* c, std::size_t ldc, std::size_t depth, std::size_t width) {
  T acc[MR][NR];
  for (std::size_t r = 0; r < MR; ++r)
    for (std::size_t j = 0; j < width; ++j) acc[r][j] = c[r * ldc + j];
  for (std::size_t k = 0; k < depth; ++k) {
    const T* bk = b + k * ldb;
    for (std::size_t r = 0; r < MR; ++r) {
      const T ar = a[r * ars + k * aks];
#pragma omp simd
      for (std::size_t j = 0; j < width; ++j) acc[r][j] += ar * bk[j];
    }
  }
  for (std::size_t r = 0; r < MR; ++r)
    for (std::size_t j = 0; j < width; ++j) c[r * ldc + j] = acc[r][j];
}

template <typename T, std::size_t MR>
void row_band(const T* a, std::size_t ars, std::size_t aks, const T* b, std::size_t ldb, T* c,
              std::size_t ldc, std::size_t n, std::size_t depth) {
  constexpr std::size_t NR = Tile<T>::cols;
  std::size_t j = 0;
  for (; j + NR <= n; j += NR) tile<T, MR, NR>(a, ars, aks, b + j, ldb, c + j, ldc, depth);
  if (j < n) tile_edge<T, MR, NR>(a, ars, aks, b + j, ldb, c + j, ldc, depth, n - j);
}

// C[m][n] += A[m][k] * B[k][n] over rows [r0, r1) of C.
template <typename T>
void blocked(const T* a, std::size_t ars, std::size_t aks, const T* b, std::size_t ldb, T* c,
             std::size_t ldc, std::size_t r0, std::size_t r1, std::size_t n, std::size_t depth) {
  constexpr std::size_t MR = Tile<T>::rows;
  std::size_t r = r0;
  for (; r + MR <= r1; r += MR) row_band<T, MR>(a + r * ars, ars, aks, b, ldb, c + r * ldc, ldc, n, depth);
  for (; r < r1; ++r) row_band<T, 1>(a + r * ars, ars, aks, b, ldb, c + r * ldc, ldc, n, depth);
}

// Row ranges aligned to the tile height so the split never changes the work
// done per row.
template <typename T, typename F>
void for_row_chunks(std::size_t rows, bool parallel, F&& f) {
  constexpr std::size_t MR = Tile<T>::rows;
  if (!parallel) {
    f(std::size_t{0}, rows);
    return;
  }
  const auto blocks = static_cast<std::ptrdiff_t>((rows + MR - 1) / MR);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t r0 = static_cast<std::size_t>(blk) * MR;
    f(r0, std::min(rows, r0 + MR));
  }
}

}  // namespace

void set_num_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#else
  (void)n;
#endif
}

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <typename T>
void row_acc(const T* x, std::size_t in, const T* w, std::size_t out, T* y) {
  blocked(x, in, std::size_t{1}, w, out, y, out, 0, 1, out, in);
}

template <typename T>
void gemm_acc(const T* x, std::size_t rows, std::size_t in, const T* w, std::size_t out, T* y) {
  for_row_chunks<T>(rows, go_parallel(rows * in * out), [&](std::size_t r0, std::size_t r1) {
    blocked(x, in, std::size_t{1}, w, out, y, out, r0, r1, out, in);
  });
}

template <typename T>
void gemm_nt_acc(const T* dy, std::size_t rows, std::size_t out, const T* w, std::size_t in,
                 T* dx) {
  // dX += dY * W^T, computed as a plain product against the transposed weights.
  std::vector<T> wt(in * out);
  for (std::size_t i = 0; i < in; ++i)
    for (std::size_t o = 0; o < out; ++o) wt[o * in + i] = w[i * out + o];
  for_row_chunks<T>(rows, go_parallel(rows * in * out), [&](std::size_t r0, std::size_t r1) {
    blocked(dy, out, std::size_t{1}, wt.data(), in, dx, in, r0, r1, in, out);
  });
}

template <typename T>
void gemm_tn_acc(const T* x, std::size_t rows, std::size_t in, const T* dy, std::size_t out,
                 T* dw) {
  // dW[i][:] += sum_t X[t][i] dY[t][:], depth-blocked in ascending t. Rows of
  // dW are split between threads; each element keeps one summation order.
  for_row_chunks<T>(in, go_parallel(rows * in * out), [&](std::size_t i0, std::size_t i1) {
    for (std::size_t t0 = 0; t0 < rows; t0 += kDepthBlock) {
      const std::size_t depth = std::min(kDepthBlock, rows - t0);
      blocked(x + t0 * in, std::size_t{1}, in, dy + t0 * out, out, dw, out, i0, i1, out, depth);
    }
  });
}

namespace serial {

template <typename T>
void gemm_acc(const T* x, std::size_t rows, std::size_t in, const T* w, std::size_t out, T* y) {
  for (std::size_t t = 0; t < rows; ++t)
    for (std::size_t i = 0; i < in; ++i)
      for (std::size_t o = 0; o < out; ++o) y[t * out + o] += x[t * in + i] * w[i * out + o];
}

template <typename T>
void gemm_nt_acc(const T* dy, std::size_t rows, std::size_t out, const T* w, std::size_t in,
                 T* dx) {
  for (std::size_t t = 0; t < rows; ++t)
    for (std::size_t i = 0; i < in; ++i) {
      T s = 0;
      for (std::size_t o = 0; o < out; ++o) s += dy[t * out + o] * w[i * out + o];
      dx[t * in + i] += s;
    }
}

template <typename T>
void gemm_tn_acc(const T* x, std::size_t rows, std::size_t in, const T* dy, std::size_t out,
                 T* dw) {
  for (std::size_t i = 0; i < in; ++i)
    for (std::size_t t = 0; t < rows; ++t)
      for (std::size_t o = 0; o < out; ++o) dw[i * out + o] += x[t * in + i] * dy[t * out + o];
}

}  // namespace serial

#define EXCITNET_INSTANTIATE(T)                                                              \
  template void row_acc<T>(const T*, std::size_t, const T*, std::size_t, T*);               \
  template void gemm_acc<T>(const T*, std::size_t, std::size_t, const T*, std::size_t, T*); \
  template void gemm_nt_acc<T>(const T*, std::size_t, std::size_t, const T*, std::size_t,   \
                               T*);                                                          \
  template void gemm_tn_acc<T>(const T*, std::size_t, std::size_t, const T*, std::size_t,   \
                               T*);                                                          \
  template void serial::gemm_acc<T>(const T*, std::size_t, std::size_t, const T*,           \
                                    std::size_t, T*);                                        \
  template void serial::gemm_nt_acc<T>(const T*, std::size_t, std::size_t, const T*,        \
                                       std::size_t, T*);                                     \
  template void serial::gemm_tn_acc<T>(const T*, std::size_t, std::size_t, const T*,        \
                                       std::size_t, T*);

EXCITNET_INSTANTIATE(float)
EXCITNET_INSTANTIATE(double)

#undef EXCITNET_INSTANTIATE

}  // namespace excitnet::net::kernels
