// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sqgspec/besov.hpp"
#include "sqgspec/error.hpp"
#include "sqgspec/harness.hpp"
#include "support.hpp"

using namespace sqgspec;
using std::numbers::pi;
using testsupport::rel_diff;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST_CASE("lq norms and conjugate exponents") {
  const std::vector<double> v = {3.0, 4.0};
  CHECK(lq_norm(v, 2.0) == doctest::Approx(5.0));
  CHECK(lq_norm(v, 1.0) == doctest::Approx(7.0));
  CHECK(lq_norm(v, kInf) == 4.0);
  CHECK(conjugate_exponent(1.0) == kInf);
  CHECK(conjugate_exponent(kInf) == 1.0);
  CHECK(conjugate_exponent(3.0) == doctest::Approx(1.5));
  const BesovParams dual = BesovParams{0.5, 4.0, 1.0}.dual();
  CHECK(dual.s == -0.5);
  CHECK(dual.p == doctest::Approx(4.0 / 3.0));
  CHECK(dual.q == kInf);
  CHECK_FALSE(BesovParams{0.0, 0.5, 2.0}.violations().empty());
}

TEST_CASE("single eigenfunction: closed form from the profile weights") {
  // e_11 on [0,π]²: √λ = √2, ‖e_11‖_2 = π/2
  const DomainSpec d{pi, pi, 8, 8, 32, 32};
  const SpectralField e = SpectralField::eigenfunction(d, 1, 1);
  const DyadicProfile phi(1.0);
  for (double s : {-0.5, 0.0, 1.0}) {
    for (double q : {1.0, 2.0, kInf}) {
      std::vector<double> terms;
      for (int j = -3; j <= 5; ++j) terms.push_back(std::pow(2.0, j * s) * phi.block_weight(j, std::sqrt(2.0)));
      const double expect = lq_norm(terms, q) * pi / 2.0;
      CHECK(rel_diff(besov_norm(e, {s, 2.0, q}, phi).norm, expect) < 1e-12);
    }
  }
}

TEST_CASE("B^0_{2,2} is comparable to L2 and profile has one entry per block") {
  const DomainSpec d{pi, pi, 16, 16, 40, 40};
  const SpectralField f = sample_field(SampleSpec{}, 3, d);
  const BesovResult r = besov_norm(f, {0.0, 2.0, 2.0}, DyadicProfile(1.0));
  const JRange range = resolved_j_range(d);
  CHECK(r.profile.size() == static_cast<std::size_t>(range.max - range.min + 1));
  // Σφ_j² ∈ [1/2, 1] pointwise
  CHECK(r.norm <= l2_norm(f) * (1 + 1e-12));
  CHECK(r.norm >= l2_norm(f) / std::sqrt(2.0));
}

TEST_CASE("vector norm of (f, 0) equals the scalar norm") {
  const DomainSpec d{pi, pi, 8, 8, 24, 24};
  const SpectralField f = sample_field(SampleSpec{}, 1, d);
  const SpectralField comps[] = {f, SpectralField(d, Parity::SS)};
  const DyadicProfile phi(1.0);
  const BesovParams bp{0.5, 3.0, 2.0};
  CHECK(rel_diff(besov_norm(comps, bp, phi).norm, besov_norm(f, bp, phi).norm) < 1e-14);
}

TEST_CASE("dual pairing lower bound never exceeds the Besov norm by much") {
  const DomainSpec d{pi, pi, 8, 8, 32, 32};
  const SpectralField f = sample_field(SampleSpec{}, 0, d);
  const DyadicProfile phi(1.0);
  const BesovParams a{0.0, 2.0, 2.0};
  std::vector<SpectralField> cands = {f, SpectralField(d, Parity::SS)};
  for (int i = 1; i < 6; ++i) cands.push_back(sample_field(SampleSpec{}, i, d));
  const double lower = dual_norm_lower_bound(f, a.dual(), cands, phi);
  CHECK(lower > 0.0);
  // ⟨f,f⟩ ≤ ‖f‖_B ‖f‖_{B'} up to the almost-orthogonality constant 2
  CHECK(lower <= 2.0 * besov_norm(f, a, phi).norm);
  CHECK_THROWS_AS(dual_norm_lower_bound(f, a.dual(), {}, phi), ParameterError);
}

TEST_CASE("embedding ratio respects the ℓ^q ordering") {
  const DomainSpec d{pi, pi, 16, 16, 40, 40};
  const SpectralField f = sample_field(SampleSpec{}, 2, d);
  const DyadicProfile phi(1.0);
  for (double s : {-0.5, 0.5}) {
    const auto r = embedding_check(f, {s, 2.0, 1.0}, {s, 2.0, 2.0}, phi);
    REQUIRE(r.has_value());
    CHECK(*r <= 1.0 + 1e-14);
    const auto r2 = embedding_check(f, {s, 2.0, 2.0}, {s, 2.0, kInf}, phi);
    CHECK(*r2 <= 1.0 + 1e-14);
  }
  CHECK_FALSE(embedding_check(SpectralField(d, Parity::SS), {0, 2, 2}, {0, 2, 2}, phi).has_value());
}

TEST_CASE("block norm table matches direct evaluation") {
  const DomainSpec d{pi, pi, 12, 12, 30, 30};
  const SpectralField f = sample_field(SampleSpec{}, 4, d);
  const DyadicProfile phi(2.0);
  const double ps[] = {1.0, 3.0};
  const BlockNorms t = block_lp_norms(std::span(&f, 1), ps, phi);
  const BesovResult direct = besov_norm(f, {0.3, 3.0, 1.5}, phi);
  CHECK(rel_diff(t.besov(t.index_of(3.0), 0.3, 1.5).norm, direct.norm) < 1e-14);
  CHECK_THROWS_AS(t.index_of(2.0), ParameterError);
}

TEST_CASE("CSV export has a header and one row per block") {
  const DomainSpec d{pi, pi, 4, 4, 16, 16};
  const BesovResult r = besov_norm(SpectralField::eigenfunction(d, 1, 1), {0, 2, 2}, DyadicProfile(1.0));
  std::ostringstream os;
  write_besov_csv(os, r);
  const std::string s = os.str();
  CHECK(s.rfind("j,block_lp_norm,weighted_term\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(r.profile.size() + 1));
}
