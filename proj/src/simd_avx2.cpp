// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "sqgspec/simd.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace sqgspec::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d vabs(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// 4×8 register block of C; columns past n handled by the scalar tail.
void gemm_avx2(std::size_t m, std::size_t n, std::size_t k,
               const double* a, std::size_t lda,
               const double* b, std::size_t ldb,
               double* c, std::size_t ldc) {
  const std::size_t n8 = n & ~std::size_t{7};
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const double* a0 = a + (i + 0) * lda;
    const double* a1 = a + (i + 1) * lda;
    const double* a2 = a + (i + 2) * lda;
    const double* a3 = a + (i + 3) * lda;
    for (std::size_t j = 0; j < n8; j += 8) {
      __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
      __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
      __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
      __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * ldb + j;
        const __m256d b0 = _mm256_loadu_pd(bp);
        const __m256d b1 = _mm256_loadu_pd(bp + 4);
        __m256d av = _mm256_broadcast_sd(a0 + p);
        c00 = _mm256_fmadd_pd(av, b0, c00);
        c01 = _mm256_fmadd_pd(av, b1, c01);
        av = _mm256_broadcast_sd(a1 + p);
        c10 = _mm256_fmadd_pd(av, b0, c10);
        c11 = _mm256_fmadd_pd(av, b1, c11);
        av = _mm256_broadcast_sd(a2 + p);
        c20 = _mm256_fmadd_pd(av, b0, c20);
        c21 = _mm256_fmadd_pd(av, b1, c21);
        av = _mm256_broadcast_sd(a3 + p);
        c30 = _mm256_fmadd_pd(av, b0, c30);
        c31 = _mm256_fmadd_pd(av, b1, c31);
      }
      _mm256_storeu_pd(c + (i + 0) * ldc + j, c00);
      _mm256_storeu_pd(c + (i + 0) * ldc + j + 4, c01);
      _mm256_storeu_pd(c + (i + 1) * ldc + j, c10);
      _mm256_storeu_pd(c + (i + 1) * ldc + j + 4, c11);
      _mm256_storeu_pd(c + (i + 2) * ldc + j, c20);
      _mm256_storeu_pd(c + (i + 2) * ldc + j + 4, c21);
      _mm256_storeu_pd(c + (i + 3) * ldc + j, c30);
      _mm256_storeu_pd(c + (i + 3) * ldc + j + 4, c31);
    }
    for (std::size_t r = 0; r < 4; ++r) {
      const double* ar = a + (i + r) * lda;
      double* cr = c + (i + r) * ldc;
      for (std::size_t j = n8; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += ar[p] * b[p * ldb + j];
        cr[j] = s;
      }
    }
  }
  // Remaining rows: broadcast-axpy form.
  for (; i < m; ++i) {
    double* ci = c + i * ldc;
    std::fill(ci, ci + n, 0.0);
    const double* ai = a + i * lda;
    for (std::size_t p = 0; p < k; ++p) {
      const __m256d av = _mm256_set1_pd(ai[p]);
      const double* bp = b + p * ldb;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        _mm256_storeu_pd(ci + j, _mm256_fmadd_pd(av, _mm256_loadu_pd(bp + j),
                                                 _mm256_loadu_pd(ci + j)));
      }
      for (; j < n; ++j) ci[j] += ai[p] * bp[j];
    }
  }
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void fma_acc_avx2(const double* x, const double* y, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                                              _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) acc[i] += x[i] * y[i];
}

double wsum_abs_avx2(const double* x, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vabs(_mm256_loadu_pd(x + i)), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * std::fabs(x[i]);
  return s;
}

double wsum_sq_avx2(const double* x, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), xv), xv, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * x[i] * x[i];
  return s;
}

double max_abs_avx2(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, vabs(_mm256_loadu_pd(x + i)));
  double r = hmax(m);
  for (; i < n; ++i) r = std::max(r, std::fabs(x[i]));
  return r;
}

}  // namespace

namespace detail {
const KernelTable& avx2_table() {
  static const KernelTable table{Isa::Avx2,    gemm_avx2,    dot_avx2,
                                 axpy_avx2,    mul_avx2,     fma_acc_avx2,
                                 wsum_abs_avx2, wsum_sq_avx2, max_abs_avx2};
  return table;
}
}  // namespace detail

}  // namespace sqgspec::simd
