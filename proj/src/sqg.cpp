// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/sqg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sqgspec/error.hpp"
#include "sqgspec/multiplier.hpp"
#include "sqgspec/simd.hpp"

namespace sqgspec {

using std::numbers::pi;

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::IFEuler: return "IF-Euler";
    case Scheme::ETD2: return "ETD2";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "IF-Euler" || s == "if-euler" || s == "IFEuler") return Scheme::IFEuler;
  if (s == "ETD2" || s == "etd2") return Scheme::ETD2;
  throw ParameterError("unknown scheme '" + std::string(s) + "' (expected IF-Euler or ETD2)");
}

std::vector<std::string> SolverConfig::violations() const {
  std::vector<std::string> v;
  if (!(dt > 0.0)) v.emplace_back("solver.dt must be > 0");
  if (!(T > 0.0)) v.emplace_back("solver.T must be > 0");
  if (dt > 0.0 && T > 0.0 && !(dt < T)) v.emplace_back("solver.dt must be smaller than solver.T");
  if (dealias_factor < 2) v.emplace_back("solver.dealias_factor must be >= 2");
  if (snapshot_stride < 1) v.emplace_back("solver.snapshot_stride must be >= 1");
  return v;
}

void SolverConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid SolverConfig:";
  for (const auto& s : v) os << ' ' << s << ';';
  throw ParameterError(os.str());
}

// ---------------------------------------------------------------------------
// SqgOperator

namespace {

DomainSpec fine_domain(const DomainSpec& d, int factor) {
  if (factor < 2) throw ParameterError("dealias factor must be >= 2");
  return d.with_grid(factor * d.M1 + 1, factor * d.M2 + 1);
}

}  // namespace

SqgOperator::SqgOperator(const DomainSpec& d, int dealias_factor)
    : domain_(d),
      fine_(fine_domain(d, dealias_factor)),
      syn_ss_(fine_, Parity::SS),
      syn_sc_(fine_, Parity::SC),
      syn_cs_(fine_, Parity::CS),
      ana_ss_(fine_, Parity::SS),
      ana_cs_(fine_, Parity::CS),
      ana_sc_(fine_, Parity::SC),
      ana_cs_wide_(fine_.with_modes(2 * d.M1, 2 * d.M2), Parity::CS),
      ana_sc_wide_(fine_.with_modes(2 * d.M1, 2 * d.M2), Parity::SC) {
  d.validate();
}

void SqgOperator::require_domain(const SpectralField& f) const {
  if (f.parity() != Parity::SS || f.domain() != domain_) {
    throw ParameterError("SQG operator applied to a field on a different domain or parity");
  }
}

struct SqgOperator::Products {
  GridField u1, u2, theta_x, theta_y, theta;
};

Velocity SqgOperator::velocity(const SpectralField& theta) const {
  require_domain(theta);
  const SpectralField psi = fractional_power(theta, -1.0);
  SpectralField u1 = partial_derivative(psi, 2);
  u1 *= -1.0;
  return {std::move(u1), partial_derivative(psi, 1)};
}

SqgOperator::Products SqgOperator::products(const SpectralField& theta, bool need_theta) const {
  const Velocity u = velocity(theta);
  const SpectralField tx = partial_derivative(theta, 1);
  const SpectralField ty = partial_derivative(theta, 2);
  Products p{GridField(fine_), GridField(fine_), GridField(fine_), GridField(fine_), GridField(fine_)};
  std::vector<double> scratch;
  syn_sc_.synthesize_into(u.u1.coefficients(), p.u1.values(), scratch);
  syn_cs_.synthesize_into(u.u2.coefficients(), p.u2.values(), scratch);
  syn_cs_.synthesize_into(tx.coefficients(), p.theta_x.values(), scratch);
  syn_sc_.synthesize_into(ty.coefficients(), p.theta_y.values(), scratch);
  if (need_theta) syn_ss_.synthesize_into(theta.coefficients(), p.theta.values(), scratch);
  return p;
}

SpectralField SqgOperator::nonlinear(const SpectralField& theta) const {
  require_domain(theta);
  const Products p = products(theta, false);
  // u1·θx: SC·CS → SS;  u2·θy: CS·SC → SS
  GridField adv = p.u1 * p.theta_x;
  adv.add_product(p.u2, p.theta_y);
  SpectralField out(domain_, Parity::SS);
  std::vector<double> scratch;
  ana_ss_.analyze_into(adv.values(), out.coefficients(), scratch);
  return out;
}

SpectralField SqgOperator::nonlinear_divergence(const SpectralField& theta) const {
  require_domain(theta);
  const Products p = products(theta, true);
  const GridField w1 = p.u1 * p.theta;  // SC·SS → CS
  const GridField w2 = p.u2 * p.theta;  // CS·SS → SC
  const SpectralField f1 = ana_cs_wide_.analyze(w1);
  const SpectralField f2 = ana_sc_wide_.analyze(w2);
  SpectralField div = partial_derivative(f1, 1);
  div += partial_derivative(f2, 2);
  return resize_modes(div, domain_.M1, domain_.M2).regrid(domain_.N1, domain_.N2);
}

std::vector<double> SqgOperator::flux_pairings(const SpectralField& theta) const {
  require_domain(theta);
  const Products p = products(theta, true);
  const GridField w1 = p.u1 * p.theta;
  const GridField w2 = p.u2 * p.theta;
  const SpectralField c1 = ana_cs_.analyze(w1);  // cos index 0..M1 × sin 1..M2
  const SpectralField c2 = ana_sc_.analyze(w2);  // sin 1..M1 × cos 0..M2
  const double L1 = domain_.L1, L2 = domain_.L2;
  const double quarter_area = 0.25 * L1 * L2;
  std::vector<double> k(static_cast<std::size_t>(domain_.M1 * domain_.M2));
  for (int m = 1; m <= domain_.M1; ++m) {
    for (int n = 1; n <= domain_.M2; ++n) {
      // ∂x e_mn = (mπ/L1) cos(mπx/L1) sin(nπy/L2), ∂y e_mn = (nπ/L2) sin cos
      const double a = c1.mode(m, n) * (m * pi / L1);
      const double b = c2.mode(m, n) * (n * pi / L2);
      k[static_cast<std::size_t>((m - 1) * domain_.M2 + (n - 1))] = quarter_area * (a + b);
    }
  }
  return k;
}

SpectralField SqgOperator::step(const SpectralField& theta, const SpectralField& n_theta, double dt,
                                Scheme scheme) const {
  if (!(dt > 0.0)) throw ParameterError("time step must be > 0");
  switch (scheme) {
    case Scheme::IFEuler: {
      SpectralField rhs = theta;
      simd::axpy(-dt, n_theta.coefficients(), rhs.coefficients());
      return heat_semigroup(rhs, dt);
    }
    case Scheme::ETD2: {
      // predictor: integrating-factor Euler
      SpectralField pred = theta;
      simd::axpy(-dt, n_theta.coefficients(), pred.coefficients());
      pred = heat_semigroup(pred, dt);
      if (!pred.all_finite()) return pred;
      const SpectralField n_pred = nonlinear(pred);
      // corrector: trapezoid on the Duhamel integral, exact propagator
      SpectralField base = theta;
      simd::axpy(-0.5 * dt, n_theta.coefficients(), base.coefficients());
      SpectralField next = heat_semigroup(base, dt);
      simd::axpy(-0.5 * dt, n_pred.coefficients(), next.coefficients());
      return next;
    }
  }
  throw ParameterError("unknown scheme");
}

SpectralField SqgOperator::step(const SpectralField& theta, double dt, Scheme scheme) const {
  return step(theta, nonlinear(theta), dt, scheme);
}

Velocity velocity(const SpectralField& theta) {
  return SqgOperator(theta.domain()).velocity(theta);
}

SpectralField nonlinear_term(const SpectralField& theta, int dealias_factor) {
  return SqgOperator(theta.domain(), dealias_factor).nonlinear(theta);
}

SpectralField nonlinear_term_divergence(const SpectralField& theta, int dealias_factor) {
  return SqgOperator(theta.domain(), dealias_factor).nonlinear_divergence(theta);
}

SpectralField step(const SpectralField& theta, double dt, Scheme scheme, int dealias_factor) {
  const SpectralField next = SqgOperator(theta.domain(), dealias_factor).step(theta, dt, scheme);
  if (!next.all_finite()) throw BlowUpError(dt, l2_norm(theta), "non-finite coefficients after one step");
  return next;
}

// ---------------------------------------------------------------------------
// Trajectories

std::size_t TrajectoryRecord::index_of_time(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::fabs(config.T));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::fabs(times[i] - t) <= tol) return i;
  }
  std::ostringstream os;
  os << "time " << t << " is not a stored snapshot time";
  throw ParameterError(os.str());
}

namespace {

StepDiagnostic diagnose(double t, const SpectralField& theta, const SpectralField& n_theta) {
  const double l2sq = coefficient_inner_product(theta, theta);
  const double orth = l2sq > 0.0 ? std::fabs(coefficient_inner_product(n_theta, theta)) / l2sq : 0.0;
  return {t, std::sqrt(l2sq), orth};
}

}  // namespace

TrajectoryRecord simulate(const SpectralField& theta0, const SolverConfig& cfg) {
  cfg.validate();
  if (theta0.parity() != Parity::SS) throw ParameterError("initial datum must be an SS field");
  if (!theta0.all_finite()) throw ParameterError("initial datum has non-finite coefficients");
  const SqgOperator op(theta0.domain(), cfg.dealias_factor);

  TrajectoryRecord traj{theta0.domain(), cfg, {0.0}, {theta0}, {}};
  const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-9)));
  SpectralField theta = theta0;
  double t = 0.0;
  for (long s = 1; s <= steps; ++s) {
    const SpectralField n_theta = op.nonlinear(theta);
    traj.diagnostics.push_back(diagnose(t, theta, n_theta));
    if (!std::isfinite(traj.diagnostics.back().l2_norm) || !n_theta.all_finite()) {
      // coefficients finite but their energy overflows
      const double last = traj.diagnostics.size() > 1 ? traj.diagnostics[traj.diagnostics.size() - 2].l2_norm : 0.0;
      std::ostringstream os;
      os << "blow-up: L2 norm overflows at t = " << t << " (last finite L2 norm " << last << ")";
      throw BlowUpError(t, last, os.str());
    }
    const double h = (s == steps) ? cfg.T - t : cfg.dt;
    SpectralField next = op.step(theta, n_theta, h, cfg.scheme);
    const double t_next = (s == steps) ? cfg.T : t + h;
    if (!next.all_finite()) {
      std::ostringstream os;
      os << "blow-up: non-finite coefficients at t = " << t_next << " (last finite L2 norm "
         << traj.diagnostics.back().l2_norm << ")";
      throw BlowUpError(t_next, traj.diagnostics.back().l2_norm, os.str());
    }
    theta = std::move(next);
    t = t_next;
    if (s % cfg.snapshot_stride == 0 || s == steps) {
      traj.times.push_back(t);
      traj.snapshots.push_back(theta);
    }
  }
  traj.diagnostics.push_back(diagnose(t, theta, op.nonlinear(theta)));
  return traj;
}

// ---------------------------------------------------------------------------
// Mild-solution residual

MildResidual::MildResidual(const TrajectoryRecord& traj) : traj_(traj) {
  if (traj.snapshots.empty()) throw ParameterError("empty trajectory");
  const SqgOperator op(traj.domain, traj.config.dealias_factor);
  pairings_.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) pairings_.push_back(op.flux_pairings(s));
}

double MildResidual::operator()(const SpectralField& g, double t) const {
  const DomainSpec& d = traj_.domain;
  if (g.parity() != Parity::SS || g.domain().M1 != d.M1 || g.domain().M2 != d.M2 ||
      !g.domain().same_geometry(d)) {
    throw ParameterError("test function must be an SS field with the trajectory's modes");
  }
  const std::size_t k = traj_.index_of_time(t);
  const double tk = traj_.times[k];
  const double quarter_area = 0.25 * d.L1 * d.L2;
  const SpectralField& theta0 = traj_.initial();
  const SpectralField& theta_t = traj_.snapshots[k];

  double lhs = 0.0, linear = 0.0, duhamel = 0.0;
  for (int m = 1; m <= d.M1; ++m) {
    for (int n = 1; n <= d.M2; ++n) {
      const double gc = g.mode(m, n);
      if (gc == 0.0) continue;
      const double lambda = eigenvalue(m, n, d);
      const std::size_t idx = static_cast<std::size_t>((m - 1) * d.M2 + (n - 1));
      lhs += quarter_area * theta_t.mode(m, n) * gc;
      linear += quarter_area * std::exp(-tk * lambda) * theta0.mode(m, n) * gc;
      double integral = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double a = traj_.times[i], b = traj_.times[i + 1];
        const double fa = std::exp(-(tk - a) * lambda) * pairings_[i][idx];
        const double fb = std::exp(-(tk - b) * lambda) * pairings_[i + 1][idx];
        integral += 0.5 * (b - a) * (fa + fb);
      }
      duhamel += gc * integral;
    }
  }
  return std::fabs(lhs - linear - duhamel);
}

double mild_residual(const TrajectoryRecord& traj, const SpectralField& g, double t) {
  return MildResidual(traj)(g, t);
}

}  // namespace sqgspec
