// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "sqgspec/error.hpp"
#include "sqgspec/harness.hpp"
#include "support.hpp"

using namespace sqgspec;
using std::numbers::pi;
using testsupport::max_abs_diff;
using testsupport::rel_diff;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST_CASE("sample fields are deterministic and indexed") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  SampleSpec s;
  s.modes = 8;
  s.count = 4;
  CHECK(max_abs_diff(sample_field(s, 2, d), sample_field(s, 2, d)) == 0.0);
  CHECK(max_abs_diff(sample_field(s, 2, d), sample_field(s, 3, d)) > 0.0);
  SampleSpec other = s;
  other.seed = 7;
  CHECK(max_abs_diff(sample_field(s, 0, d), sample_field(other, 0, d)) > 0.0);
  CHECK_THROWS_AS(sample_field(s, 4, d), IndexError);
  CHECK_THROWS_AS(sample_field(s, -1, d), IndexError);
  s.modes = 3;
  const SpectralField f = sample_field(s, 0, d);
  CHECK(f.mode(4, 1) == 0.0);
  CHECK(f.mode(3, 3) != 0.0);
  SampleRng a(1, 2), b(1, 2), c(1, 3);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  CHECK(x >= 0.0);
  CHECK(x < 1.0);
}

TEST_CASE("two-mode data has two distinct eigenvalues") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  for (int i = 0; i < 20; ++i) {
    const SpectralField f = two_mode_field(d, 42, i);
    std::vector<double> lambdas;
    for (int m = 1; m <= 8; ++m) {
      for (int n = 1; n <= 8; ++n) {
        if (f.mode(m, n) == 0.0) continue;
        CHECK(std::fabs(f.mode(m, n)) >= 0.5);
        CHECK(std::fabs(f.mode(m, n)) <= 1.5);
        lambdas.push_back(eigenvalue(m, n, d));
      }
    }
    REQUIRE(lambdas.size() == 2);
    CHECK(lambdas[0] != lambdas[1]);
  }
}

TEST_CASE("parallel_for covers every index once and propagates exceptions") {
  std::vector<int> hits(37, 0);
  parallel_for(37, 4, [&](int i) { ++hits[i]; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(5, 3, [](int i) { if (i == 3) throw ParameterError("x"); }), ParameterError);
}

TEST_CASE("battery results do not depend on the worker count") {
  const DomainSpec d{pi, pi, 8, 8, 20, 20};
  SampleSpec s;
  s.modes = 8;
  s.count = 6;
  const auto tuples = default_battery();
  CHECK(tuples.size() == 75);
  const std::vector<BilinearTuple> some(tuples.begin(), tuples.begin() + 6);
  const auto a = bilinear_battery(d, s, some, DyadicProfile(1.0), std::nullopt, 1);
  const auto b = bilinear_battery(d, s, some, DyadicProfile(1.0), d.with_grid(40, 40), 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ratios == b[i].ratios);
    CHECK(a[i].ratios.size() == 6);  // one ratio per (f, g) pair
    CHECK(b[i].refinement_stable.value());
    CHECK(std::isfinite(a[i].max));
  }
}

TEST_CASE("default battery satisfies the hypotheses") {
  for (const auto& t : default_battery()) CHECK(t.violations().empty());
  BilinearTuple bad;
  bad.s = 2.5;
  CHECK_FALSE(bad.violations().empty());
  bad = BilinearTuple{0.0, 1.0, 2.0, 3.0, 2.0, 2.0, 2.0};
  CHECK_FALSE(bad.violations().empty());
}

TEST_CASE("bilinear bound degenerate and symmetric cases") {
  const DomainSpec d{pi, pi, 8, 8, 20, 20};
  const DyadicProfile phi(1.0);
  const SpectralField e = SpectralField::eigenfunction(d, 1, 1);
  const SpectralField zero(d, Parity::SS);
  const BilinearTuple t{0.5, 1.0, 2.0, 2.0, 2.0, 2.0, 2.0};

  const BilinearParts z = verify_bilinear(zero, e, t, phi);
  CHECK(z.lhs == 0.0);
  CHECK(z.ratio.value() == 0.0);

  std::vector<double> w;
  for (int j = -3; j <= 6; ++j) w.push_back(std::pow(2.0, 0.5 * j) * phi.block_weight(j, std::sqrt(2.0)));
  const double expect = 2.0 * lq_norm(w, 2.0) * (pi / 2) * (pi / 2);
  CHECK(rel_diff(verify_bilinear(e, e, t, phi).rhs, expect) < 1e-12);

  SampleSpec s;
  s.modes = 8;
  const SpectralField f = sample_field(s, 0, d), g = sample_field(s, 1, d);
  const BilinearTuple sym{0.5, 2.0, 3.0, 6.0, 6.0, 3.0, kInf};
  const BilinearParts fg = verify_bilinear(f, g, sym, phi), gf = verify_bilinear(g, f, sym, phi);
  CHECK(rel_diff(fg.lhs, gf.lhs) < 1e-12);
  CHECK(rel_diff(fg.rhs, gf.rhs) < 1e-12);
}

TEST_CASE("product decomposition is exact") {
  const DomainSpec d{pi, pi, 12, 12, 25, 25};
  SampleSpec s;
  s.modes = 12;
  const ProductDecomposition r = verify_product_decomposition(sample_field(s, 0, d), sample_field(s, 1, d), DyadicProfile(1.0));
  CHECK(r.residual < 1e-12);
  CHECK(r.nonzero_terms > 1);
}

TEST_CASE("derivative-structure identity holds with the corrected sign only") {
  const DomainSpec d{pi, pi, 8, 8, 20, 20};
  SampleSpec s;
  s.modes = 8;
  const DyadicProfile phi(1.0);
  const SpectralField f = dyadic_block(sample_field(s, 0, d), 1, phi);
  const SpectralField g = dyadic_block(sample_field(s, 1, d), 2, phi);
  QuadratureSpec q;
  const StructureResidual ok = verify_derivative_structure(f, g, q);
  CHECK(ok.residual < 1e-9);
  CHECK(ok.lhs_norm > 0.0);
  const StructureResidual printed = verify_derivative_structure(f, g, q, StructureSign::AsPrinted);
  CHECK(printed.residual == doctest::Approx(2.0).epsilon(1e-6));
  // F∇G − F∇G cancels for f = g single mode; denominator falls back to the term scale
  const SpectralField e = SpectralField::eigenfunction(d, 1, 1);
  CHECK(verify_derivative_structure(e, e, q).residual < 1e-9);
}

TEST_CASE("multiplier and heat bounds on a small sample") {
  const DomainSpec d{pi, pi, 8, 8, 24, 24};
  SampleSpec s;
  s.modes = 8;
  s.count = 4;
  const MultiplierBounds b = multiplier_bounds(d, s, {1.0, 2.0, kInf}, DyadicProfile(1.0));
  CHECK_FALSE(b.rows.empty());
  for (const auto& r : b.rows) CHECK(r.finite);
  // φ ≤ 1 pointwise and ‖φ_j f‖₂ ≤ ‖f‖₂
  for (const auto& r : b.rows) {
    if (r.p == 2.0) CHECK(r.multiplier_max <= 1.0 + 1e-12);
  }
  CHECK(b.gradient_identity_error < 1e-12);
  CHECK(b.find(2.0, 1) != nullptr);
  CHECK(b.find(5.0, 1) == nullptr);
  for (const auto& [p, v] : b.elliptic_max) CHECK(std::isfinite(v));

  const HeatSmoothing h = heat_smoothing(d, s, DyadicProfile(1.0));
  for (const auto& [j, rate] : h.decay_rates) CHECK(rate <= -0.25 * std::pow(4.0, j));
  // sup_λ √(tλ) e^{−tλ} = (2e)^{-1/2}
  CHECK(h.gradient_smoothing_max <= 1.0 / std::sqrt(2.0 * std::exp(1.0)) + 1e-12);
}

TEST_CASE("Duhamel growth vanishes on a single mode") {
  const DomainSpec d{pi, pi, 6, 6, 12, 12};
  SolverConfig c;
  c.dt = 0.01;
  c.T = 0.05;
  const auto r = verify_duhamel_growth(simulate(SpectralField::eigenfunction(d, 2, 1), c), 1.5, DyadicProfile(1.0));
  REQUIRE(r.has_value());
  CHECK(*r < 1e-13);
  CHECK_FALSE(verify_duhamel_growth(simulate(SpectralField(d, Parity::SS), c), 1.5, DyadicProfile(1.0)).has_value());
  CHECK_THROWS_AS(verify_duhamel_growth(simulate(SpectralField(d, Parity::SS), c), 2.0, DyadicProfile(1.0)), ParameterError);
}

TEST_CASE("initial smallness follows the heat decay of a single mode") {
  const DomainSpec d{pi, pi, 4, 4, 40, 40};
  const SpectralField e = SpectralField::eigenfunction(d, 1, 1);
  const double l3 = lp_norm(synthesize(e), 3.0);
  const auto curve = verify_initial_smallness(e, 1.5, {1e-1, 1e-3, 0.0});
  REQUIRE(curve.size() == 3);
  for (const auto& [t, v] : curve) CHECK(std::fabs(v - std::pow(t, 1.0 / 6.0) * std::exp(-2.0 * t) * l3) < 1e-14);
  CHECK(curve.back().second == 0.0);
  CHECK_THROWS_AS(verify_initial_smallness(e, 1.5, {-1.0}), ParameterError);
}

TEST_CASE("identical solver configurations give a zero uniqueness curve") {
  const DomainSpec d{pi, pi, 6, 6, 12, 12};
  SolverConfig c;
  c.dt = 0.01;
  c.T = 0.05;
  const UniquenessCurve u = uniqueness_experiment(two_mode_field(d, 1, 0), c, c);
  CHECK(u.max_distance == 0.0);
  CHECK_FALSE(u.diverged);
  CHECK(u.times.size() == u.distances.size());
  SolverConfig half = c;
  half.dt = 0.005;
  half.snapshot_stride = 2;
  CHECK(uniqueness_experiment(two_mode_field(d, 1, 0), c, half).max_distance > 0.0);
  half.T = 1.0;
  CHECK_THROWS_AS(uniqueness_experiment(two_mode_field(d, 1, 0), c, half), ParameterError);
}

TEST_CASE("report export writes infinite exponents as strings") {
  EstimateReport r;
  r.params = BilinearTuple{0.0, 1.0, 2.0, 2.0, 2.0, 2.0, kInf};
  r.ratios = {0.5, 0.25};
  r.max = 0.5;
  std::ostringstream os;
  write_reports_json(os, {r});
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j.dump().find("\"inf\"") != std::string::npos);
  std::ostringstream csv;
  write_curve_csv(csv, "t", "v", {{1.0, 2.0}});
  CHECK(csv.str().rfind("t,v\n", 0) == 0);
}
