#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

// Low-level loops shared by forward and backward passes.
//
// Row invariance: every output row of `affine_rows` is produced by the same
// sequence of fused multiply-adds no matter how many rows are in the batch, so
// a single-token forward and a batched forward agree bit for bit. The build
// disables floating-point contraction; all fusing here is explicit.
namespace gtppo::netcore::kernels {

namespace detail {

inline constexpr int kRowTile = 4;
inline constexpr int kColTile = 64;

enum class Init { zero, bias, keep };

// R rows by C columns of out = init + x w, one fma per k in ascending order
// for every element. The register tile shape never changes the per-element
// arithmetic, so any row grouping gives identical bits.
template <typename T, int R, int C>
inline void gemm_tile(const T* x, int din, const T* w, int dout, const T* bias, Init init, T* out, int j0) {
  T acc[R][C];
  for (int r = 0; r < R; ++r) {
#pragma omp simd
    for (int j = 0; j < C; ++j) {
      acc[r][j] = init == Init::bias   ? bias[j0 + j]
                  : init == Init::keep ? out[static_cast<std::size_t>(r) * dout + j0 + j]
                                       : T(0);
    }
  }
  for (int k = 0; k < din; ++k) {
    const T* wk = w + static_cast<std::size_t>(k) * dout + j0;
    for (int r = 0; r < R; ++r) {
      const T a = x[static_cast<std::size_t>(r) * din + k];
#pragma omp simd
      for (int j = 0; j < C; ++j) acc[r][j] = std::fma(a, wk[j], acc[r][j]);
    }
  }
  for (int r = 0; r < R; ++r) {
#pragma omp simd
    for (int j = 0; j < C; ++j) out[static_cast<std::size_t>(r) * dout + j0 + j] = acc[r][j];
  }
}

template <typename T, int R>
inline void gemm_rows_fixed(const T* x, int din, const T* w, int dout, const T* bias, Init init, T* out) {
  int j0 = 0;
  for (; j0 + kColTile <= dout; j0 += kColTile) gemm_tile<T, R, kColTile>(x, din, w, dout, bias, init, out, j0);
  for (; j0 + 16 <= dout; j0 += 16) gemm_tile<T, R, 16>(x, din, w, dout, bias, init, out, j0);
  for (; j0 < dout; ++j0) gemm_tile<T, R, 1>(x, din, w, dout, bias, init, out, j0);
}

template <typename T>
void gemm_rows(const T* x, int rows, int din, const T* w, int dout, const T* bias, Init init, T* out) {
  int r = 0;
  for (; r + kRowTile <= rows; r += kRowTile) {
    gemm_rows_fixed<T, kRowTile>(x + static_cast<std::size_t>(r) * din, din, w, dout, bias, init,
                                 out + static_cast<std::size_t>(r) * dout);
  }
  for (; r < rows; ++r) {
    gemm_rows_fixed<T, 1>(x + static_cast<std::size_t>(r) * din, din, w, dout, bias, init,
                          out + static_cast<std::size_t>(r) * dout);
  }
}

}  // namespace detail

// out[r, :] = bias + sum_k x[r, k] * w[k, :]   (k ascending)
template <typename T>
void affine_rows(const T* x, int rows, int din, const T* w, int dout, const T* bias, T* out) {
  detail::gemm_rows(x, rows, din, w, dout, bias, bias != nullptr ? detail::Init::bias : detail::Init::zero, out);
}

// acc[k, :] += sum_r x[r, k] * g[r, :]   (weight gradient, x^T g, r ascending)
template <typename T>
void accumulate_outer(const T* x, int rows, int din, const T* g, int dout, T* acc) {
  std::vector<T> xt(static_cast<std::size_t>(din) * rows);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < din; ++k) xt[static_cast<std::size_t>(k) * rows + r] = x[static_cast<std::size_t>(r) * din + k];
  }
  detail::gemm_rows(xt.data(), din, rows, g, dout, static_cast<const T*>(nullptr), detail::Init::keep, acc);
}

// acc[r, :] += g[r, :] w^T through a transposed copy of w.
template <typename T>
void accumulate_input_grad(const T* g, int rows, int dout, const T* w, int din, T* acc) {
  std::vector<T> wt(static_cast<std::size_t>(din) * dout);
  for (int k = 0; k < din; ++k) {
    for (int j = 0; j < dout; ++j) wt[static_cast<std::size_t>(j) * din + k] = w[static_cast<std::size_t>(k) * dout + j];
  }
  detail::gemm_rows(g, rows, dout, wt.data(), din, static_cast<const T*>(nullptr), detail::Init::keep, acc);
}

template <typename T>
T dot(const T* a, const T* b, int n) {
  T s = T(0);
#pragma omp simd reduction(+ : s)
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// y += a * x
template <typename T>
void axpy(T a, const T* x, T* y, int n) {
#pragma omp simd
  for (int i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

}  // namespace gtppo::netcore::kernels
