// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sqgspec/error.hpp"
#include "sqgspec/harness.hpp"
#include "sqgspec/multiplier.hpp"
#include "support.hpp"

using namespace sqgspec;
using std::numbers::pi;
using testsupport::max_abs_diff;
using testsupport::random_field;
using testsupport::rel_diff;

TEST_CASE("dyadic profile is supported on (1/2, 2) and sums to one") {
  for (double sharp : {1.0, 2.0, 8.0}) {
    const DyadicProfile phi(sharp);
    CHECK(phi(0.5) == 0.0);
    CHECK(phi(2.0) == 0.0);
    CHECK(phi(1.0) > 0.0);
    for (double s = 1.0; s < 1024.0; s *= 1.0137) {
      double sum = 0.0;
      for (int j = -2; j <= 12; ++j) sum += phi.block_weight(j, s);
      CHECK(std::fabs(sum - 1.0) < 1e-14);
    }
  }
  CHECK_THROWS_AS(DyadicProfile(0.5), ParameterError);
  CHECK_THROWS_AS(DyadicProfile(9.0), ParameterError);
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 3, 8, 32}) {
    const MuRule r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(std::fabs(s - exact) < 1e-13);
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), ParameterError);
}

TEST_CASE("log-panel rule integrates 1/mu over the range") {
  QuadratureSpec q;
  q.nodes_per_decade = 8;
  const MuRule r = mu_quadrature(q);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] / r.nodes[i];
  CHECK(rel_diff(s, std::log(q.mu_max / q.mu_min)) < 1e-12);
  q.mu_max = q.mu_min;
  CHECK_THROWS_AS(q.validate(), ParameterError);
}

TEST_CASE("block decomposition reconstructs the field") {
  const DomainSpec d{pi, 1.7, 20, 20, 40, 40};
  const SpectralField f = random_field(d, Parity::SS, 6);
  const DyadicProfile phi(1.0);
  const JRange r = resolved_j_range(d);
  SpectralField sum(d, Parity::SS);
  for (int j = r.min; j <= r.max; ++j) sum += dyadic_block(f, j, phi);
  CHECK(max_abs_diff(sum, f) < 1e-14);
  CHECK(dyadic_block(f, r.min - 1, phi).is_zero());
  CHECK(dyadic_block(f, r.max + 1, phi).is_zero());
}

TEST_CASE("resolvent identity R(a) - R(b) = (a - b) R(a) Δ R(b)") {
  const DomainSpec d{pi, pi, 12, 12, 24, 24};
  const SpectralField f = random_field(d, Parity::SS, 7);
  const double a = 0.3, b = 0.02;
  const SpectralField lhs = resolvent(f, a) - resolvent(f, b);
  const SpectralField rhs = -(a - b) * neg_laplacian(resolvent(resolvent(f, b), a));
  CHECK(max_abs_diff(lhs, rhs) < 1e-14);
  CHECK_THROWS_AS(resolvent(f, 0.0), ParameterError);
}

TEST_CASE("heat semigroup property and exact single-mode decay") {
  const DomainSpec d{pi, 2.0, 10, 10, 20, 20};
  const SpectralField f = random_field(d, Parity::SS, 8);
  CHECK(max_abs_diff(heat_semigroup(heat_semigroup(f, 0.01), 0.02), heat_semigroup(f, 0.03)) < 1e-15);
  const SpectralField e = SpectralField::eigenfunction(d, 2, 3);
  CHECK(rel_diff(heat_semigroup(e, 0.1).mode(2, 3), std::exp(-0.1 * eigenvalue(2, 3, d))) < 1e-15);
  CHECK_THROWS_AS(heat_semigroup(f, -1.0), ParameterError);
}

TEST_CASE("fractional powers compose") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  const SpectralField f = random_field(d, Parity::SS, 9);
  CHECK(max_abs_diff(fractional_power(fractional_power(f, 1.0), 1.0), neg_laplacian(f)) < 1e-12);
  CHECK(max_abs_diff(fractional_power(fractional_power(f, 0.7), -0.7), f) < 1e-14);
}

TEST_CASE("multipliers reject non-SS fields and non-finite symbols") {
  const DomainSpec d{pi, pi, 4, 4, 8, 8};
  CHECK_THROWS_AS(neg_laplacian(SpectralField(d, Parity::CS)), ParameterError);
  const SpectralField e = SpectralField::eigenfunction(d, 1, 1);
  CHECK_THROWS_AS(apply_multiplier(e, [](double) { return std::nan(""); }), NumericError);
}

TEST_CASE("square root by resolvent quadrature converges to the spectral value") {
  const DomainSpec d{pi, pi, 32, 32, 64, 64};
  SampleSpec spec;
  spec.modes = 32;
  const SpectralField f = sample_field(spec, 0, d);
  const SpectralField exact = fractional_power(f, 1.0);
  const double scale = l2_norm(exact);
  double prev = 1.0;
  for (int n : {4, 8, 16, 32}) {
    QuadratureSpec q;
    q.nodes_per_decade = n;
    const ResolventSqrt r = sqrt_via_resolvent(f, q);
    CHECK(r.cutoffs_bracket_spectrum);
    const double err = l2_norm(r.value - exact) / scale;
    CAPTURE(n);
    CHECK(err <= std::max(prev, 1e-13));
    prev = err;
  }
  CHECK(prev < 1e-9);
}

TEST_CASE("square root tails are reported when cutoffs miss the spectrum") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  QuadratureSpec q;
  q.mu_min = 1.0;
  q.mu_max = 10.0;
  const ResolventSqrt r = sqrt_via_resolvent(SpectralField::eigenfunction(d, 1, 1), q);
  CHECK_FALSE(r.cutoffs_bracket_spectrum);
  CHECK(r.truncation_bound > 0.1);
}
