// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sqgspec/domain.hpp"

namespace testsupport {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return v;
}

/// Random coefficients in an arbitrary parity class.
inline sqgspec::SpectralField random_field(const sqgspec::DomainSpec& d, sqgspec::Parity p, std::uint64_t seed) {
  sqgspec::SpectralField f(d, p);
  const auto v = random_vector(f.coefficients().size(), seed);
  std::copy(v.begin(), v.end(), f.coefficients().begin());
  return f;
}

inline double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

inline double max_abs_diff(const sqgspec::SpectralField& a, const sqgspec::SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
    m = std::max(m, std::fabs(a.coefficients()[i] - b.coefficients()[i]));
  }
  return m;
}

}  // namespace testsupport
