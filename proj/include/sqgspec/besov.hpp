// SPDX-License-Identifier: Apache-2.0
#pragma once

// Truncated homogeneous Besov norms
//   ‖f‖_{Ḃ^s_{p,q}} = ‖ { 2^{js} ‖φ_j(Λ_D) f‖_{L^p} }_j ‖_{ℓ^q}
// over the dyadic blocks resolved by the truncated spectrum.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqgspec/domain.hpp"
#include "sqgspec/multiplier.hpp"

namespace sqgspec {

struct BesovParams {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;  ///< +inf allowed

  std::vector<std::string> violations() const;
  /// (−s, p', q') with 1/p + 1/p' = 1.
  BesovParams dual() const;
};

/// Hölder conjugate; 1 ↔ ∞.
double conjugate_exponent(double p);

struct BesovTerm {
  int j;
  double block_lp_norm;
  double weighted_term;  ///< 2^{js} · block_lp_norm
};

struct BesovResult {
  double norm = 0.0;
  std::vector<BesovTerm> profile;
};

/// ℓ^q norm of a nonnegative sequence; q = +inf gives the maximum.
double lq_norm(std::span<const double> terms, double q);

/// ‖φ_j f‖_{L^p} for every j in `range` and every p in `exponents`,
/// indexed [p][j − range.min]. Components are combined by pointwise
/// Euclidean magnitude, so a vector field is passed as several SS fields.
struct BlockNorms {
  JRange range;
  std::vector<double> exponents;
  std::vector<std::vector<double>> norms;

  /// Besov norm assembled from the stored block norms for exponent index `pi`.
  BesovResult besov(std::size_t pi, double s, double q) const;
  std::size_t index_of(double p) const;
};

BlockNorms block_lp_norms(std::span<const SpectralField> components, std::span<const double> exponents,
                          const DyadicProfile& profile, std::optional<JRange> range = std::nullopt);

BesovResult besov_norm(const SpectralField& f, const BesovParams& params, const DyadicProfile& profile,
                       std::optional<JRange> range = std::nullopt);
/// Vector-valued version (pointwise Euclidean magnitude inside each block).
BesovResult besov_norm(std::span<const SpectralField> components, const BesovParams& params,
                       const DyadicProfile& profile, std::optional<JRange> range = std::nullopt);

/// max_g |⟨f, g⟩| / ‖g‖_{dual}. Throws ParameterError for an empty candidate
/// list; zero candidates are skipped.
double dual_norm_lower_bound(const SpectralField& f, const BesovParams& dual_params,
                             std::span<const SpectralField> candidates, const DyadicProfile& profile);

/// ‖f‖_B / ‖f‖_A, or nullopt when ‖f‖_A = 0.
std::optional<double> embedding_check(const SpectralField& f, const BesovParams& a,
                                      const BesovParams& b, const DyadicProfile& profile);

/// CSV: j,block_lp_norm,weighted_term
void write_besov_csv(std::ostream& os, const BesovResult& r);

}  // namespace sqgspec
