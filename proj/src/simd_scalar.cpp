// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/simd.hpp"

#include <algorithm>
#include <cmath>

namespace sqgspec::simd {
namespace {

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k,
                 const double* a, std::size_t lda,
                 const double* b, std::size_t ldb,
                 double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * ldc;
    std::fill(ci, ci + n, 0.0);
    const double* ai = a + i * lda;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      if (aip == 0.0) continue;
      const double* bp = b + p * ldb;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void fma_acc_scalar(const double* x, const double* y, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * y[i];
}

double wsum_abs_scalar(const double* x, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::fabs(x[i]);
  return s;
}

double wsum_sq_scalar(const double* x, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * x[i];
  return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar,    gemm_scalar,    dot_scalar,
                                 axpy_scalar,    mul_scalar,     fma_acc_scalar,
                                 wsum_abs_scalar, wsum_sq_scalar, max_abs_scalar};
  return table;
}

}  // namespace sqgspec::simd
