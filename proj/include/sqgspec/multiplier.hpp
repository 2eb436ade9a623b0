// SPDX-License-Identifier: Apache-2.0
#pragma once

// Functions of Λ_D = (−Δ_D)^{1/2} acting on SS fields. Every operator here is
// diagonal in the Dirichlet eigenbasis.

#include <functional>
#include <string>
#include <vector>

#include "sqgspec/domain.hpp"

namespace sqgspec {

/// Littlewood–Paley bump φ(λ) = χ(λ) − χ(2λ), where χ = 1 on [0,1], 0 on [2,∞),
/// and the transition is a quintic smoothstep in log₂λ. `sharpness` ≥ 1 narrows
/// the transition toward the middle of the band; 1 uses the whole band.
class DyadicProfile {
 public:
  static constexpr double kMinSharpness = 1.0;
  static constexpr double kMaxSharpness = 8.0;

  explicit DyadicProfile(double sharpness = 1.0);

  double sharpness() const { return sharpness_; }
  double cutoff(double lambda) const;
  double operator()(double lambda) const;
  /// φ(2^{-j} s)
  double block_weight(int j, double s) const;

 private:
  double sharpness_;
};

DyadicProfile build_dyadic_profile(double sharpness);

/// Log-spaced composite Gauss–Legendre rule for μ-integrals over
/// [mu_min, mu_max], one panel per decade. The two tails outside the range are
/// summed as convergent series in (−Δ_D) and (−Δ_D)^{-1} with `tail_terms` terms
/// when the cutoffs bracket the spectrum.
struct QuadratureSpec {
  int nodes_per_decade = 32;
  double mu_min = 1e-8;
  double mu_max = 1e8;
  int tail_terms = 4;

  std::vector<std::string> violations() const;
  void validate() const;
};

struct MuRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // ∫ g(μ) dμ ≈ Σ weights[k] g(nodes[k])
};

/// Gauss–Legendre nodes and weights on [−1, 1].
MuRule gauss_legendre(int n);
MuRule mu_quadrature(const QuadratureSpec& q);

/// Normalization of ∫₀^∞ μ^{-3/2}(1 − 1/(1+μa)) dμ = π√a.
inline constexpr double kResolventSqrtConstant = 1.0 / std::numbers::pi;

/// Smallest and largest Dirichlet eigenvalue of the truncated spectrum.
double lambda_min(const DomainSpec& d);
double lambda_max(const DomainSpec& d);

/// Coefficient (m,n) ← coefficient · m(√λ_mn). Throws NumericError if m is
/// non-finite on the spectrum, ParameterError for non-SS fields.
SpectralField apply_multiplier(const SpectralField& f, const std::function<double(double)>& m);
/// Coefficient (m,n) ← coefficient · g(λ_mn), λ the eigenvalue of −Δ_D.
SpectralField apply_eigen_multiplier(const SpectralField& f, const std::function<double(double)>& g);

struct JRange {
  int min;
  int max;
};
/// j_min = ⌊log₂√λ_min⌋ − 1, j_max = ⌈log₂√λ_max⌉ + 1: every non-vanishing block.
JRange resolved_j_range(const DomainSpec& d);

SpectralField dyadic_block(const SpectralField& f, int j, const DyadicProfile& profile);
/// Λ_D^α
SpectralField fractional_power(const SpectralField& f, double alpha);
/// −Δ_D, exact in the eigenvalues.
SpectralField neg_laplacian(const SpectralField& f);
/// e^{tΔ_D}; throws ParameterError for t < 0.
SpectralField heat_semigroup(const SpectralField& f, double t);
/// (1 − μΔ_D)^{-1}; throws ParameterError for μ <= 0.
SpectralField resolvent(const SpectralField& f, double mu);

struct ResolventSqrt {
  SpectralField value;
  /// Relative error bound contributed by the μ-range cutoffs (tails).
  double truncation_bound;
  bool cutoffs_bracket_spectrum;
};

/// Λ_D f = c₀ ∫₀^∞ μ^{-3/2} (f − (1−μΔ_D)^{-1} f) dμ with c₀ = 1/π, evaluated by
/// quadrature of resolvents. Never takes a square root of the spectrum.
ResolventSqrt sqrt_via_resolvent(const SpectralField& f, const QuadratureSpec& q);

}  // namespace sqgspec
