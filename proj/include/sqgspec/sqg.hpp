// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dissipative SQG on the rectangle with Dirichlet data:
//   ∂t θ = Δ_D θ − N(θ),   N(θ) = u·∇θ,   u = ∇^⊥ Λ_D^{-1} θ = (−∂y ψ, ∂x ψ), ψ = Λ_D^{-1} θ.
// The linear part is propagated exactly by e^{tΔ_D}; products are formed on a
// dealiasing grid and projected back onto the retained SS modes (Galerkin).

#include <filesystem>
#include <string>
#include <vector>

#include "sqgspec/domain.hpp"

namespace sqgspec {

enum class Scheme { IFEuler, ETD2 };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

struct SolverConfig {
  double dt = 1e-3;
  double T = 0.5;
  Scheme scheme = Scheme::ETD2;
  int dealias_factor = 2;
  int snapshot_stride = 1;

  std::vector<std::string> violations() const;
  void validate() const;
};

struct Velocity {
  SpectralField u1;  // −∂y ψ, SC parity
  SpectralField u2;  //  ∂x ψ, CS parity
};

/// Products of fields on the dealiasing grid (N = factor·M + 1 per axis).
class SqgOperator {
 public:
  SqgOperator(const DomainSpec& d, int dealias_factor = 2);

  const DomainSpec& domain() const { return domain_; }
  const DomainSpec& dealias_domain() const { return fine_; }

  Velocity velocity(const SpectralField& theta) const;
  /// u·∇θ (convective form), projected onto the retained SS modes.
  SpectralField nonlinear(const SpectralField& theta) const;
  /// ∇·(uθ) with the products resolved exactly in their own parity classes.
  SpectralField nonlinear_divergence(const SpectralField& theta) const;
  /// K(m,n) = ∫_Ω u θ · ∇ e_mn dx for every retained eigenfunction, row-major M1×M2.
  std::vector<double> flux_pairings(const SpectralField& theta) const;

  /// One time step; `n_theta` must be nonlinear(theta).
  SpectralField step(const SpectralField& theta, const SpectralField& n_theta, double dt,
                     Scheme scheme) const;
  SpectralField step(const SpectralField& theta, double dt, Scheme scheme) const;

 private:
  void require_domain(const SpectralField& f) const;
  struct Products;
  Products products(const SpectralField& theta, bool need_theta) const;

  DomainSpec domain_;
  DomainSpec fine_;
  Transform syn_ss_;
  Transform syn_sc_;
  Transform syn_cs_;
  Transform ana_ss_;       // fine grid → SS, M modes
  Transform ana_cs_;       // fine grid → CS, M modes
  Transform ana_sc_;       // fine grid → SC, M modes
  Transform ana_cs_wide_;  // fine grid → CS, 2M modes
  Transform ana_sc_wide_;  // fine grid → SC, 2M modes
};

Velocity velocity(const SpectralField& theta);
SpectralField nonlinear_term(const SpectralField& theta, int dealias_factor = 2);
SpectralField nonlinear_term_divergence(const SpectralField& theta, int dealias_factor = 2);
SpectralField step(const SpectralField& theta, double dt, Scheme scheme, int dealias_factor = 2);

struct StepDiagnostic {
  double time;
  double l2_norm;
  /// |⟨N(θ), θ⟩| / ‖θ‖₂² (0 for θ = 0)
  double orthogonality_residual;
};

struct TrajectoryRecord {
  DomainSpec domain;
  SolverConfig config;
  std::vector<double> times;
  std::vector<SpectralField> snapshots;
  std::vector<StepDiagnostic> diagnostics;

  const SpectralField& initial() const { return snapshots.front(); }
  const SpectralField& final_state() const { return snapshots.back(); }
  /// Index of the snapshot stored at time t (relative tolerance 1e-12); throws ParameterError.
  std::size_t index_of_time(double t) const;
};

/// Deterministic integration from 0 to cfg.T. Throws BlowUpError with the failing time.
TrajectoryRecord simulate(const SpectralField& theta0, const SolverConfig& cfg);

/// Residual of the weak Duhamel identity against test functions, built from
/// stored snapshots only.
class MildResidual {
 public:
  explicit MildResidual(const TrajectoryRecord& traj);
  /// |⟨θ(t),g⟩ − ⟨e^{tΔ}θ₀,g⟩ − ∫₀ᵗ ∫ uθ·∇e^{(t−τ)Δ}g dx dτ|, τ-integral by trapezoid
  /// over the snapshots. Throws ParameterError when t is not a stored time.
  double operator()(const SpectralField& g, double t) const;

 private:
  const TrajectoryRecord& traj_;
  std::vector<std::vector<double>> pairings_;
};

double mild_residual(const TrajectoryRecord& traj, const SpectralField& g, double t);

/// Directory layout: config.json, snapshots/snapshot_NNNNNN.field,
/// snapshots.csv (index,time,file), diagnostics.csv (time,l2_norm,orthogonality_residual).
void save_trajectory(const std::filesystem::path& dir, const TrajectoryRecord& traj);
TrajectoryRecord load_trajectory(const std::filesystem::path& dir);

}  // namespace sqgspec
