// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops used by the transforms, pointwise products and
// quadrature reductions. Every kernel has a scalar reference implementation;
// wider variants are selected once at runtime from the CPU feature set.

#include <cstddef>
#include <span>
#include <string_view>

namespace sqgspec::simd {

enum class Isa { Scalar, Avx2 };

/// Row-major C(m×n) = A(m×k) · B(k×n). Leading dimensions are row strides.
using GemmFn = void (*)(std::size_t m, std::size_t n, std::size_t k,
                        const double* a, std::size_t lda,
                        const double* b, std::size_t ldb,
                        double* c, std::size_t ldc);
using DotFn = double (*)(const double* x, const double* y, std::size_t n);
using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);
using MulFn = void (*)(const double* x, const double* y, double* out, std::size_t n);
using FmaAccFn = void (*)(const double* x, const double* y, double* acc, std::size_t n);
using WeightedSumFn = double (*)(const double* x, const double* w, std::size_t n);
using MaxAbsFn = double (*)(const double* x, std::size_t n);

struct KernelTable {
  Isa isa;
  GemmFn gemm;
  DotFn dot;
  AxpyFn axpy;
  MulFn mul;            // out = x * y
  FmaAccFn fma_acc;     // acc += x * y
  WeightedSumFn wsum_abs;  // Σ w |x|
  WeightedSumFn wsum_sq;   // Σ w x²
  MaxAbsFn max_abs;
};

const KernelTable& scalar_kernels();
/// AVX2/FMA table, or nullptr when not compiled in or unsupported by the CPU.
const KernelTable* avx2_kernels();

/// Kernels for the active ISA. Chosen on first use: the widest variant the
/// CPU supports, unless SQGSPEC_SIMD=scalar is set in the environment.
const KernelTable& kernels();

/// True when the AVX2/FMA variant was compiled in and the CPU supports it.
bool avx2_available();

/// Overrides the active table (tests and benchmarks). Not thread-safe with
/// respect to concurrent kernel use; call before starting workers.
void select(Isa isa);

std::string_view isa_name(Isa isa);

// Thin span wrappers around the active table.
inline double dot(std::span<const double> x, std::span<const double> y) {
  return kernels().dot(x.data(), y.data(), x.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}
inline void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  kernels().mul(x.data(), y.data(), out.data(), x.size());
}
inline void fma_acc(std::span<const double> x, std::span<const double> y, std::span<double> acc) {
  kernels().fma_acc(x.data(), y.data(), acc.data(), x.size());
}
inline double max_abs(std::span<const double> x) {
  return kernels().max_abs(x.data(), x.size());
}

}  // namespace sqgspec::simd
