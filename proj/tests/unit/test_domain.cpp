// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sqgspec/domain.hpp"
#include "sqgspec/error.hpp"
#include "sqgspec/simd.hpp"
#include "support.hpp"

using namespace sqgspec;
using std::numbers::pi;
using testsupport::max_abs_diff;
using testsupport::random_field;
using testsupport::rel_diff;

TEST_CASE("domain validation lists violated invariants") {
  DomainSpec d;
  CHECK(d.violations().empty());
  CHECK_NOTHROW(d.validate());
  d.N1 = 8;
  CHECK_FALSE(d.violations().empty());
  CHECK_THROWS_AS(d.validate(), ParameterError);
  d = DomainSpec{};
  d.L2 = -1.0;
  CHECK_FALSE(d.violations().empty());
  d = DomainSpec{};
  d.M1 = 0;
  CHECK_FALSE(d.violations().empty());
}

TEST_CASE("eigenvalues follow the closed form and reject out-of-range modes") {
  const DomainSpec d{2.0, 3.0, 8, 8, 16, 16};
  CHECK(rel_diff(eigenvalue(3, 5, d), pi * pi * (9.0 / 4.0 + 25.0 / 9.0)) < 1e-15);
  CHECK_THROWS_AS(eigenvalue(0, 1, d), IndexError);
  CHECK_THROWS_AS(eigenvalue(1, 9, d), IndexError);
}

TEST_CASE("parity algebra") {
  CHECK(flip_axis(Parity::SS, 1) == Parity::CS);
  CHECK(flip_axis(Parity::SS, 2) == Parity::SC);
  CHECK(flip_axis(Parity::CC, 2) == Parity::CS);
  CHECK(product_parity(Parity::SS, Parity::SS) == Parity::CC);
  CHECK(product_parity(Parity::CS, Parity::SS) == Parity::SC);
  CHECK(product_parity(Parity::SC, Parity::CS) == Parity::SS);
  CHECK(parse_parity(to_string(Parity::SC)) == Parity::SC);
  CHECK_THROWS_AS(parse_parity("XY"), ParameterError);
}

TEST_CASE("field layout and mode access") {
  const DomainSpec d{pi, pi, 4, 5, 8, 8};
  SpectralField ss(d, Parity::SS), cs(d, Parity::CS);
  CHECK(ss.rows() == 4);
  CHECK(ss.cols() == 5);
  CHECK(cs.rows() == 5);
  CHECK(cs.cols() == 5);
  cs.set_mode(0, 2, 3.0);
  CHECK(cs(0, 1) == 3.0);
  CHECK(cs.mode(0, 2) == 3.0);
  CHECK_THROWS_AS(ss.set_mode(0, 1, 1.0), IndexError);
  CHECK_THROWS_AS(SpectralField(d, Parity::SS, std::vector<double>(3)), ParameterError);
  SpectralField other(d.with_grid(16, 16), Parity::SS);
  CHECK_THROWS_AS(ss += other, ParameterError);
}

TEST_CASE("synthesis reproduces pointwise eigenfunction values") {
  const DomainSpec d{2.0, 1.5, 6, 6, 11, 13};
  const SpectralField e = SpectralField::eigenfunction(d, 3, 2, 1.7);
  const GridField g = synthesize(e);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const double exact = 1.7 * std::sin(3 * pi * g.x(i) / d.L1) * std::sin(2 * pi * g.y(j) / d.L2);
      CHECK(std::fabs(g(i, j) - exact) < 1e-14);
    }
  }
}

TEST_CASE("analysis inverts synthesis in every parity class") {
  const DomainSpec d{pi, 2.0, 12, 9, 20, 17};
  for (Parity p : {Parity::SS, Parity::CS, Parity::SC, Parity::CC}) {
    CAPTURE(to_string(p));
    const SpectralField f = random_field(d, p, 11 + static_cast<int>(p));
    const SpectralField back = analyze(synthesize(f), p);
    CHECK(max_abs_diff(back, f) < 1e-13);
  }
}

TEST_CASE("transforms are identical under scalar and AVX2 kernels") {
  if (!simd::avx2_available()) return;
  const DomainSpec d{pi, pi, 16, 16, 64, 64};
  const SpectralField f = random_field(d, Parity::SC, 5);
  const simd::Isa before = simd::kernels().isa;
  simd::select(simd::Isa::Scalar);
  const GridField gs = synthesize(f);
  const SpectralField as = analyze(gs, Parity::SC);
  simd::select(simd::Isa::Avx2);
  const GridField ga = synthesize(f);
  const SpectralField aa = analyze(ga, Parity::SC);
  simd::select(before);
  double m = 0.0;
  for (std::size_t i = 0; i < gs.values().size(); ++i) m = std::max(m, std::fabs(gs.values()[i] - ga.values()[i]));
  CHECK(m < 1e-13);
  CHECK(max_abs_diff(as, aa) < 1e-13);
}

TEST_CASE("spectral derivatives match centred finite differences on the grid") {
  const DomainSpec d{pi, pi, 5, 5, 400, 400};
  const SpectralField f = random_field(d, Parity::SS, 3);
  const GridField g = synthesize(f);
  const GridField gx = synthesize(partial_derivative(f, 1));
  const GridField gy = synthesize(partial_derivative(f, 2));
  const double h = d.spacing(1);
  double ex = 0.0, ey = 0.0, scale = 0.0;
  for (std::size_t i = 1; i + 1 < g.rows(); ++i) {
    for (std::size_t j = 1; j + 1 < g.cols(); ++j) {
      ex = std::max(ex, std::fabs((g(i + 1, j) - g(i - 1, j)) / (2 * h) - gx(i, j)));
      ey = std::max(ey, std::fabs((g(i, j + 1) - g(i, j - 1)) / (2 * h) - gy(i, j)));
      scale = std::max(scale, std::fabs(gx(i, j)));
    }
  }
  // O(h²·k³) truncation with k ≤ 5
  CHECK(ex < 1e-3 * scale);
  CHECK(ey < 1e-3 * scale);
  CHECK_THROWS_AS(partial_derivative(f, 3), ParameterError);
}

TEST_CASE("second derivatives recover the eigenvalue relation") {
  const DomainSpec d{1.0, 2.0, 10, 10, 24, 24};
  const SpectralField f = random_field(d, Parity::SS, 9);
  const SpectralField lap = partial_derivative(partial_derivative(f, 1), 1) + partial_derivative(partial_derivative(f, 2), 2);
  for (int m = 1; m <= d.M1; ++m) {
    for (int n = 1; n <= d.M2; ++n) {
      CHECK(std::fabs(lap.mode(m, n) + eigenvalue(m, n, d) * f.mode(m, n)) < 1e-12 * eigenvalue(m, n, d));
    }
  }
}

TEST_CASE("L^p norms of sin x sin y against closed forms") {
  const DomainSpec d{pi, pi, 4, 4, 63, 63};  // x = π/2 is a node
  const GridField g = synthesize(SpectralField::eigenfunction(d, 1, 1));
  CHECK(rel_diff(lp_norm(g, 2.0), pi / 2.0) < 1e-12);
  CHECK(rel_diff(lp_norm(g, 1.0), 4.0) < 1e-3);  // |sin| has a kink: second-order trapezoid
  CHECK(rel_diff(lp_norm(g, 3.0), std::cbrt(16.0 / 9.0)) < 1e-3);
  CHECK(lp_norm(g, std::numeric_limits<double>::infinity()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(lp_norm(g, 0.5), ParameterError);
}

TEST_CASE("trapezoid L1 converges at second order") {
  double prev = 0.0;
  for (int n : {31, 63}) {
    const DomainSpec d{pi, pi, 1, 1, n, n};
    const double err = std::fabs(lp_norm(synthesize(SpectralField::eigenfunction(d, 1, 1)), 1.0) - 4.0);
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("Parseval: grid inner products equal coefficient inner products") {
  const DomainSpec d{1.3, 0.7, 10, 12, 20, 24};
  for (Parity p : {Parity::SS, Parity::CS, Parity::SC, Parity::CC}) {
    const SpectralField f = random_field(d, p, 1), g = random_field(d, p, 2);
    CHECK(rel_diff(inner_product(synthesize(f), synthesize(g)), coefficient_inner_product(f, g)) < 1e-12);
  }
  CHECK_THROWS_AS(inner_product(GridField(d), GridField(d.with_grid(21, 24))), ParameterError);
}

TEST_CASE("vector L^p uses the pointwise Euclidean magnitude") {
  const DomainSpec d{pi, pi, 3, 3, 30, 30};
  const GridField a = synthesize(SpectralField::eigenfunction(d, 1, 1, 3.0));
  const GridField b = synthesize(SpectralField::eigenfunction(d, 1, 1, 4.0));
  const GridField both[] = {a, b};
  CHECK(rel_diff(lp_norm(both, 3.0), 5.0 / 3.0 * lp_norm(a, 3.0)) < 1e-13);
}

TEST_CASE("parity projection uses exact overlap integrals") {
  // cos(0·y) = 1 = Σ_{n odd} 4/(πn) sin(ny) on [0, π]
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  SpectralField one(d, Parity::SC);
  one.set_mode(1, 0, 1.0);
  const SpectralField s = project_parity(one, Parity::SS, 8, 8);
  for (int n = 1; n <= 8; ++n) {
    const double expect = n % 2 ? 4.0 / (pi * n) : 0.0;
    CHECK(std::fabs(s.mode(1, n) - expect) < 1e-14);
  }
  // projecting back and forth within the same parity is the identity
  const SpectralField f = random_field(d, Parity::SS, 4);
  CHECK(max_abs_diff(project_parity(f, Parity::SS, 8, 8), f) < 1e-15);
}

TEST_CASE("resize and regrid keep coefficients") {
  const DomainSpec d{pi, pi, 6, 6, 12, 12};
  const SpectralField f = random_field(d, Parity::SS, 8);
  const SpectralField big = resize_modes(f, 9, 9);
  CHECK(big.mode(6, 6) == f.mode(6, 6));
  CHECK(big.mode(9, 9) == 0.0);
  CHECK(max_abs_diff(resize_modes(big, 6, 6), f) == 0.0);
  const SpectralField r = f.regrid(30, 30);
  CHECK(r.domain().N1 == 30);
  CHECK(rel_diff(lp_norm(synthesize(r), 2.0), l2_norm(f)) < 1e-12);
}
