// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace sqgspec::simd {

#if defined(SQGSPEC_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table();
}
#endif

bool avx2_available() {
#if defined(SQGSPEC_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

const KernelTable* avx2_kernels() {
#if defined(SQGSPEC_HAVE_AVX2)
  if (avx2_available()) return &detail::avx2_table();
#endif
  return nullptr;
}

namespace {

const KernelTable* initial_table() {
  if (const char* env = std::getenv("SQGSPEC_SIMD")) {
    if (std::string(env) == "scalar") return &scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& kernels() { return *active().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (isa == Isa::Avx2) {
    if (const KernelTable* t = avx2_kernels()) {
      active().store(t);
      return;
    }
  }
  active().store(&scalar_kernels());
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace sqgspec::simd
