// SPDX-License-Identifier: Apache-2.0
#pragma once

// Empirical checks of the functional-calculus estimates: bilinear Besov
// bound, product decomposition, derivative-structure identity, multiplier /
// Bernstein / heat bounds, Duhamel growth, initial smallness and the twin
// solver uniqueness experiment. The constants involved are unknown, so every
// check reports ratios; acceptance looks at finiteness and refinement stability.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sqgspec/besov.hpp"
#include "sqgspec/domain.hpp"
#include "sqgspec/multiplier.hpp"
#include "sqgspec/sqg.hpp"

namespace sqgspec {

struct SampleSpec {
  int modes = 16;        ///< coefficients (m,n) with m,n <= modes are populated
  double decay = 1.0;    ///< |c_mn| ∝ λ_mn^{-decay/2}
  std::uint64_t seed = 42;
  int count = 100;
  bool randomize_decay = false;  ///< draw sample i's exponent uniformly in [0, 2·decay]

  std::vector<std::string> violations() const;
};

/// mt19937_64 seeded from (seed, index, stream); uniforms use the top 53 bits
/// so draws do not depend on the standard library's distributions.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// Deterministic nonzero SS field on `d`: signed uniform coefficients damped by λ^{-decay/2}.
SpectralField sample_field(const SampleSpec& spec, int index, const DomainSpec& d);

/// Two low modes with distinct eigenvalues and amplitudes in ±[0.5, 1.5]·amplitude.
SpectralField two_mode_field(const DomainSpec& d, std::uint64_t seed, int index, double amplitude = 1.0);

/// Runs fn(i) for i in [0, count) on up to `workers` threads; results are the
/// caller's responsibility to store by index, so reductions stay ordered.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

// ---------------------------------------------------------------------------
// Bilinear estimate

struct BilinearTuple {
  double s = 0.0;
  double p = 1.0;
  double p1 = 2.0, p2 = 2.0, p3 = 2.0, p4 = 2.0;
  double q = 2.0;

  /// Hypotheses: −1 < s < 2, 1/p = 1/p1 + 1/p2 = 1/p3 + 1/p4, 1 < p2, p3 < ∞, p ≥ 1, q ≥ 1.
  std::vector<std::string> violations() const;
  std::string label() const;
};

/// s ∈ {−0.5, 0, 0.5, 1, 1.5} × q ∈ {1, 2, ∞} × exponent sets
/// (2,2,2,2) [p=1], (3,6,3,6), (3,6,6,3), (6,3,3,6), (6,3,6,3) [p=2].
std::vector<BilinearTuple> default_battery();

struct BilinearParts {
  double lhs;
  double rhs;
  std::optional<double> ratio;  ///< nullopt when rhs = 0 and lhs != 0
};

/// Precomputes everything that does not depend on (s, q) for one pair (f, g):
/// the vector field (∇Λ_D^{-1}f)g + f∇Λ_D^{-1}g projected onto SS with 2M modes,
/// and the dyadic block norms of f, g and that field.
class BilinearEvaluator {
 public:
  BilinearEvaluator(const SpectralField& f, const SpectralField& g, const DyadicProfile& profile,
                    std::vector<double> exponents = {1.0, 2.0, 3.0, 6.0}, int dealias_factor = 2);
  BilinearParts evaluate(const BilinearTuple& t) const;

  /// SS projections (x and y components) of the left-hand side field.
  const std::pair<SpectralField, SpectralField>& lhs_field() const { return lhs_; }

 private:
  std::pair<SpectralField, SpectralField> lhs_;
  BlockNorms f_blocks_, g_blocks_, lhs_blocks_;
  std::vector<double> exponents_;
  std::vector<double> f_lp_, g_lp_;
};

/// LHS/RHS of the bilinear bound for one pair and tuple.
BilinearParts verify_bilinear(const SpectralField& f, const SpectralField& g, const BilinearTuple& t,
                              const DyadicProfile& profile);

struct EstimateReport {
  BilinearTuple params;
  std::vector<double> ratios;
  double max = 0.0;
  double mean = 0.0;
  std::size_t rejected = 0;            ///< samples with undefined ratio
  std::optional<double> refined_max;   ///< max on the refined grid
  std::optional<bool> refinement_stable;
};

/// Ratio statistics over spec.count sample pairs for every tuple; if
/// `refined` is given the same samples are re-evaluated there and
/// refinement_stable = (1/2 < max_refined/max < 2).
std::vector<EstimateReport> bilinear_battery(const DomainSpec& d, const SampleSpec& spec,
                                             const std::vector<BilinearTuple>& tuples,
                                             const DyadicProfile& profile,
                                             std::optional<DomainSpec> refined = std::nullopt,
                                             int workers = 1);

// ---------------------------------------------------------------------------
// Product decomposition and derivative structure

struct ProductDecomposition {
  double residual;     ///< relative L² residual of the two half-sums against fg
  int nonzero_terms;   ///< (k,l) pairs with both blocks nonzero
};

ProductDecomposition verify_product_decomposition(const SpectralField& f, const SpectralField& g,
                                                  const DyadicProfile& profile, int dealias_factor = 2);

enum class StructureSign {
  Corrected,  ///< (ΛF)∇G − F∇ΛG = −c₀∫μ^{-3/2}{(−μΔ)(A∇B) + 2μΣ∂m(∂mA ∇B)}dμ
  AsPrinted   ///< same integrand with the opposite overall sign
};

struct StructureResidual {
  /// ‖LHS − RHS‖₂ / ‖LHS‖₂; if the two LHS terms cancel to below 1e-6 of their
  /// size, the denominator is ‖f∇G‖₂ + ‖F∇g‖₂ instead. 0 when everything vanishes.
  double residual;
  double lhs_norm;
  double truncation_bound;  ///< estimated relative contribution of the μ-range cutoffs
  int nodes;
};

/// With F = Λ_D^{-1} f_k, G = Λ_D^{-1} g_l, A = (1−μΔ_D)^{-1}F, B = (1−μΔ_D)^{-1}G,
/// compares (ΛF)∇G − F∇ΛG computed directly with its resolvent-integral
/// (Leibniz) form evaluated by μ-quadrature.
StructureResidual verify_derivative_structure(const SpectralField& f_k, const SpectralField& g_l,
                                              const QuadratureSpec& q,
                                              StructureSign sign = StructureSign::Corrected,
                                              int dealias_factor = 2);

// ---------------------------------------------------------------------------
// Multiplier, Bernstein, elliptic and heat bounds

struct MultiplierRow {
  double p;
  int j;
  double multiplier_max;   ///< max ‖φ_j f‖_p / ‖f‖_p
  double bernstein1_max;   ///< max ‖∇φ_j f‖_p / (2^j ‖f‖_p)
  double bernstein2_max;   ///< max ‖∇²φ_j f‖_p / (2^{2j} ‖f‖_p)
  bool finite;
};

struct MultiplierBounds {
  std::vector<MultiplierRow> rows;
  /// max over samples and j of ‖φ_j f‖_∞ / (2^j ‖f‖_2)  (L² → L^∞ smoothing)
  double smoothing_2_inf_max = 0.0;
  /// max relative | ‖∇f‖₂ − ‖Λf‖₂ | / ‖Λf‖₂
  double gradient_identity_error = 0.0;
  /// p → max ‖∇²f‖_p / ‖Δf‖_p
  std::vector<std::pair<double, double>> elliptic_max;

  const MultiplierRow* find(double p, int j) const;
};

MultiplierBounds multiplier_bounds(const DomainSpec& d, const SampleSpec& spec, const std::vector<double>& ps,
                                   const DyadicProfile& profile, const std::vector<double>& elliptic_ps = {1.5, 2.0, 3.0},
                                   int workers = 1);

struct HeatSmoothing {
  /// (j, max over samples of the fitted decay rate of ‖e^{tΔ}φ_j f‖₂/‖φ_j f‖₂ on t ∈ [0, 2^{-2j}])
  std::vector<std::pair<int, double>> decay_rates;
  /// sup over t ∈ [1e-4, 1] and samples of t^{1/2}‖∇e^{tΔ}f‖₂/‖f‖₂
  double gradient_smoothing_max = 0.0;
};

HeatSmoothing heat_smoothing(const DomainSpec& d, const SampleSpec& spec, const DyadicProfile& profile,
                             int workers = 1);

// ---------------------------------------------------------------------------
// Trajectory-based checks

/// sup_t ‖θ(t) − e^{tΔ}θ₀‖_{Ḃ^{s}_{p,∞}} / (sup_t ‖θ(t)‖₂)², s = −1 + 2/p unless given.
/// nullopt for a zero trajectory.
std::optional<double> verify_duhamel_growth(const TrajectoryRecord& traj, double p, const DyadicProfile& profile,
                                            std::optional<double> s = std::nullopt);

/// (t, t^{1/2 − 1/(2p)} ‖e^{tΔ}θ₀‖_{L^{2p}}) for each t in `times`.
std::vector<std::pair<double, double>> verify_initial_smallness(const SpectralField& theta0, double p,
                                                                const std::vector<double>& times);

struct UniquenessCurve {
  std::vector<double> times;
  std::vector<double> distances;  ///< ‖θ_A(t) − θ_B(t)‖₂
  double max_distance = 0.0;
  bool diverged = false;          ///< a run blew up; curve truncated
};

UniquenessCurve uniqueness_experiment(const SpectralField& theta0, const SolverConfig& a, const SolverConfig& b);

// ---------------------------------------------------------------------------
// Export

void write_reports_json(std::ostream& os, const std::vector<EstimateReport>& reports);
void write_curve_csv(std::ostream& os, const std::string& xname, const std::string& yname,
                     const std::vector<std::pair<double, double>>& curve);

}  // namespace sqgspec
