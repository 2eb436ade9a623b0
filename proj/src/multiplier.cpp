// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sqgspec/error.hpp"
#include "sqgspec/simd.hpp"

namespace sqgspec {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// DyadicProfile

DyadicProfile::DyadicProfile(double sharpness) : sharpness_(sharpness) {
  if (!(sharpness >= kMinSharpness && sharpness <= kMaxSharpness)) {
    std::ostringstream os;
    os << "profile sharpness " << sharpness << " outside [" << kMinSharpness << ", "
       << kMaxSharpness << "]";
    throw ParameterError(os.str());
  }
}

double DyadicProfile::cutoff(double lambda) const {
  if (lambda <= 1.0) return 1.0;
  if (lambda >= 2.0) return 0.0;
  double t = (std::log2(lambda) - 0.5) * sharpness_ + 0.5;
  t = std::clamp(t, 0.0, 1.0);
  const double smooth = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
  return 1.0 - smooth;
}

double DyadicProfile::operator()(double lambda) const {
  if (lambda <= 0.5 || lambda >= 2.0) return 0.0;
  return cutoff(lambda) - cutoff(2.0 * lambda);
}

double DyadicProfile::block_weight(int j, double s) const { return (*this)(std::ldexp(s, -j)); }

DyadicProfile build_dyadic_profile(double sharpness) { return DyadicProfile(sharpness); }

// ---------------------------------------------------------------------------
// Quadrature

std::vector<std::string> QuadratureSpec::violations() const {
  std::vector<std::string> v;
  if (nodes_per_decade < 4) v.emplace_back("quadrature.nodes_per_decade must be >= 4");
  if (!(mu_min > 0.0)) v.emplace_back("quadrature.mu_min must be > 0");
  if (!(mu_max > mu_min)) v.emplace_back("quadrature.mu_max must exceed quadrature.mu_min");
  if (tail_terms < 0) v.emplace_back("quadrature.tail_terms must be >= 0");
  return v;
}

void QuadratureSpec::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid QuadratureSpec:";
  for (const auto& s : v) os << ' ' << s << ';';
  throw ParameterError(os.str());
}

MuRule gauss_legendre(int n) {
  if (n < 1) throw ParameterError("Gauss–Legendre order must be >= 1");
  MuRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

MuRule mu_quadrature(const QuadratureSpec& q) {
  q.validate();
  const MuRule gl = gauss_legendre(q.nodes_per_decade);
  const double s0 = std::log(q.mu_min), s1 = std::log(q.mu_max);
  const double decades = std::log10(q.mu_max / q.mu_min);
  const int panels = std::max(1, static_cast<int>(std::ceil(decades - 1e-9)));
  const double width = (s1 - s0) / panels;
  MuRule r;
  r.nodes.reserve(static_cast<std::size_t>(panels) * gl.nodes.size());
  r.weights.reserve(r.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double a = s0 + p * width;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double s = a + 0.5 * width * (gl.nodes[k] + 1.0);
      const double mu = std::exp(s);
      r.nodes.push_back(mu);
      r.weights.push_back(0.5 * width * gl.weights[k] * mu);  // dμ = μ ds
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Spectral multipliers

double lambda_min(const DomainSpec& d) { return eigenvalue(1, 1, d); }
double lambda_max(const DomainSpec& d) { return eigenvalue(d.M1, d.M2, d); }

namespace {

void require_ss(const SpectralField& f, const char* op) {
  if (f.parity() != Parity::SS) {
    throw ParameterError(std::string(op) + " is defined on SS (Dirichlet) fields only");
  }
}

}  // namespace

SpectralField apply_eigen_multiplier(const SpectralField& f, const std::function<double(double)>& g) {
  require_ss(f, "spectral multiplier");
  SpectralField out = f;
  const DomainSpec& d = f.domain();
  for (int m = 1; m <= d.M1; ++m) {
    for (int n = 1; n <= d.M2; ++n) {
      const double w = g(eigenvalue(m, n, d));
      if (!std::isfinite(w)) {
        std::ostringstream os;
        os << "multiplier is non-finite at mode (" << m << ',' << n << ')';
        throw NumericError(os.str());
      }
      out(static_cast<std::size_t>(m - 1), static_cast<std::size_t>(n - 1)) *= w;
    }
  }
  return out;
}

SpectralField apply_multiplier(const SpectralField& f, const std::function<double(double)>& m) {
  return apply_eigen_multiplier(f, [&m](double lambda) { return m(std::sqrt(lambda)); });
}

JRange resolved_j_range(const DomainSpec& d) {
  const double smin = std::sqrt(lambda_min(d));
  const double smax = std::sqrt(lambda_max(d));
  return {static_cast<int>(std::floor(std::log2(smin))) - 1,
          static_cast<int>(std::ceil(std::log2(smax))) + 1};
}

SpectralField dyadic_block(const SpectralField& f, int j, const DyadicProfile& profile) {
  return apply_multiplier(f, [&](double s) { return profile.block_weight(j, s); });
}

SpectralField fractional_power(const SpectralField& f, double alpha) {
  return apply_eigen_multiplier(f, [alpha](double lambda) { return std::pow(lambda, 0.5 * alpha); });
}

SpectralField neg_laplacian(const SpectralField& f) {
  return apply_eigen_multiplier(f, [](double lambda) { return lambda; });
}

SpectralField heat_semigroup(const SpectralField& f, double t) {
  if (!(t >= 0.0)) throw ParameterError("heat semigroup time must be >= 0");
  if (t == 0.0) return f;
  return apply_eigen_multiplier(f, [t](double lambda) { return std::exp(-t * lambda); });
}

SpectralField resolvent(const SpectralField& f, double mu) {
  if (!(mu > 0.0)) throw ParameterError("resolvent parameter must be > 0");
  return apply_eigen_multiplier(f, [mu](double lambda) { return 1.0 / (1.0 + mu * lambda); });
}

ResolventSqrt sqrt_via_resolvent(const SpectralField& f, const QuadratureSpec& q) {
  require_ss(f, "sqrt_via_resolvent");
  const MuRule rule = mu_quadrature(q);
  const DomainSpec& d = f.domain();
  const double lmin = lambda_min(d), lmax = lambda_max(d);

  SpectralField acc(d, Parity::SS);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double mu = rule.nodes[k];
    SpectralField term = f - resolvent(f, mu);
    simd::axpy(rule.weights[k] * std::pow(mu, -1.5), term.coefficients(), acc.coefficients());
  }

  // ∫₀^{μmin}: μ^{-3/2}(1 − (1+μA)^{-1}) = Σ_k (−1)^k μ^{k−1/2} A^{k+1}, valid for μ_min·λ_max < 1.
  // ∫_{μmax}^∞: μ^{-3/2} − Σ_k (−1)^k μ^{−k−5/2} A^{−k−1}, valid for μ_max·λ_min > 1.
  const int K = q.tail_terms;
  const bool left_ok = q.mu_min * lmax < 1.0;
  const bool right_ok = q.mu_max * lmin > 1.0;
  double bound = 0.0;
  if (left_ok) {
    const double mu0 = q.mu_min;
    SpectralField left = apply_eigen_multiplier(f, [&](double lambda) {
      double s = 0.0, sign = 1.0;
      for (int k = 0; k < K; ++k) {
        s += sign * 2.0 * std::pow(mu0, k + 0.5) * std::pow(lambda, k + 1) / (2.0 * k + 1.0);
        sign = -sign;
      }
      return s;
    });
    acc += left;
    bound += (2.0 / pi) * std::pow(mu0 * lmax, K + 0.5) / (2.0 * K + 1.0);
  } else {
    bound += (2.0 / pi) * std::sqrt(q.mu_min * lmax);
  }
  if (right_ok) {
    const double mu1 = q.mu_max;
    SpectralField right = apply_eigen_multiplier(f, [&](double lambda) {
      double s = 2.0 / std::sqrt(mu1), sign = 1.0;
      for (int k = 0; k < K; ++k) {
        s -= sign * std::pow(mu1, -1.5 - k) * std::pow(lambda, -(k + 1.0)) / (1.5 + k);
        sign = -sign;
      }
      return s;
    });
    acc += right;
    bound += std::pow(mu1 * lmin, -(K + 1.5)) / (pi * (K + 1.5));
  } else {
    bound += (2.0 / pi) / std::sqrt(q.mu_max * lmin);
  }
  acc *= kResolventSqrtConstant;
  return {std::move(acc), bound, left_ok && right_ok};
}

}  // namespace sqgspec
