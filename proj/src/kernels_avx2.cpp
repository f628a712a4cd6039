// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

// This file is compiled with -mavx2 -mfma regardless of the global target
// flags; the dispatcher in kernels.cpp only routes here after a CPU check.

#include "kernels_avx2.hpp"

#if DYKNET_HAVE_AVX2

#include <immintrin.h>

namespace dyknet::kernels::avx2 {

namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc);
  }
  double result = horizontal_sum(acc);
  for (; k < n; ++k) result += a[k] * b[k];
  return result;
}

double squared_norm(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v = _mm256_loadu_pd(a + k);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double result = horizontal_sum(acc);
  for (; k < n; ++k) result += a[k] * a[k];
  return result;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double result = horizontal_sum(acc);
  for (; k < n; ++k) {
    const double d = a[k] - b[k];
    result += d * d;
  }
  return result;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

void scale(double* x, double alpha, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(x + k, _mm256_mul_pd(_mm256_loadu_pd(x + k), va));
  }
  for (; k < n; ++k) x[k] *= alpha;
}

void lincomb(double alpha, const double* x, double beta, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + k));
    _mm256_storeu_pd(out + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), by));
  }
  for (; k < n; ++k) out[k] = alpha * x[k] + beta * y[k];
}

}  // namespace dyknet::kernels::avx2

#endif
