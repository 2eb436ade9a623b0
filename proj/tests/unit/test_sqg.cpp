// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "sqgspec/error.hpp"
#include "sqgspec/harness.hpp"
#include "sqgspec/multiplier.hpp"
#include "sqgspec/sqg.hpp"
#include "support.hpp"

using namespace sqgspec;
using std::numbers::pi;
using testsupport::max_abs_diff;
using testsupport::rel_diff;

namespace {

SpectralField sample(const DomainSpec& d, int index, double decay = 1.0) {
  SampleSpec s;
  s.modes = d.M1;
  s.decay = decay;
  return sample_field(s, index, d);
}

}  // namespace

TEST_CASE("scheme names round trip") {
  CHECK(parse_scheme(to_string(Scheme::ETD2)) == Scheme::ETD2);
  CHECK(parse_scheme(to_string(Scheme::IFEuler)) == Scheme::IFEuler);
  CHECK_THROWS_AS(parse_scheme("RK4"), ParameterError);
  SolverConfig c;
  c.dt = 0.0;
  CHECK_FALSE(c.violations().empty());
  CHECK_THROWS_AS(SqgOperator(DomainSpec{}, 1), ParameterError);
}

TEST_CASE("velocity is divergence free and has the stream-function parities") {
  const DomainSpec d{pi, 1.3, 10, 12, 24, 24};
  const Velocity u = velocity(sample(d, 0));
  CHECK(u.u1.parity() == Parity::SC);
  CHECK(u.u2.parity() == Parity::CS);
  const SpectralField div = partial_derivative(u.u1, 1) + partial_derivative(u.u2, 2);
  double m = 0.0;
  for (double c : div.coefficients()) m = std::max(m, std::fabs(c));
  CHECK(m < 1e-13);
}

TEST_CASE("velocity of a single mode is the rotated gradient of θ/√λ") {
  const DomainSpec d{pi, pi, 4, 4, 12, 12};
  const SpectralField e = SpectralField::eigenfunction(d, 2, 1);
  const Velocity u = velocity(e);
  // u1 = −∂y(e/√5) = −cos(y)sin(2x)/√5
  CHECK(u.u1.mode(2, 0) == 0.0);
  CHECK(std::fabs(u.u1.mode(2, 1) + 1.0 / std::sqrt(5.0)) < 1e-15);
  CHECK(std::fabs(u.u2.mode(2, 1) - 2.0 / std::sqrt(5.0)) < 1e-15);
}

TEST_CASE("nonlinear term is orthogonal to θ and vanishes on single modes") {
  const DomainSpec d{pi, pi, 12, 12, 25, 25};
  for (int i = 0; i < 5; ++i) {
    const SpectralField th = sample(d, i);
    const SpectralField n = nonlinear_term(th);
    CHECK(std::fabs(coefficient_inner_product(n, th)) < 1e-12 * coefficient_inner_product(th, th) * l2_norm(th));
  }
  const SpectralField e = SpectralField::eigenfunction(d, 3, 5, 2.0);
  double m = 0.0;
  for (double c : nonlinear_term(e).coefficients()) m = std::max(m, std::fabs(c));
  CHECK(m < 1e-13);
}

TEST_CASE("convective and divergence forms agree") {
  const DomainSpec d{2.0, pi, 10, 8, 21, 17};
  for (int i = 0; i < 3; ++i) {
    const SpectralField th = sample(d, i, 0.5);
    const SpectralField a = nonlinear_term(th), b = nonlinear_term_divergence(th);
    CHECK(l2_norm(a - b) < 1e-12 * l2_norm(a));
  }
}

TEST_CASE("dealiasing factor does not change the Galerkin projection") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  const SpectralField th = sample(d, 4);
  CHECK(l2_norm(nonlinear_term(th, 2) - nonlinear_term(th, 3)) < 1e-13 * l2_norm(nonlinear_term(th, 2)));
}

TEST_CASE("single eigenfunction decays exactly") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  const SpectralField e = SpectralField::eigenfunction(d, 2, 3, 0.7);
  for (Scheme s : {Scheme::IFEuler, Scheme::ETD2}) {
    SolverConfig c;
    c.dt = 1e-2;
    c.T = 0.25;
    c.scheme = s;
    const TrajectoryRecord tr = simulate(e, c);
    CHECK(tr.times.back() == 0.25);
    const double exact = 0.7 * std::exp(-0.25 * eigenvalue(2, 3, d));
    CHECK(std::fabs(tr.final_state().mode(2, 3) - exact) < 1e-14);
  }
}

TEST_CASE("IF-Euler is first order and ETD2 second order") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  const SpectralField th = two_mode_field(d, 42, 0, 2.0);
  SolverConfig ref;
  ref.T = 0.1;
  ref.dt = 1e-5;
  const SpectralField exact = simulate(th, ref).final_state();
  for (Scheme s : {Scheme::IFEuler, Scheme::ETD2}) {
    SolverConfig c;
    c.T = 0.1;
    c.scheme = s;
    c.dt = 0.01;
    const double e1 = l2_norm(simulate(th, c).final_state() - exact);
    c.dt = 0.005;
    const double e2 = l2_norm(simulate(th, c).final_state() - exact);
    const double order = std::log2(e1 / e2);
    CAPTURE(to_string(s));
    if (s == Scheme::IFEuler) CHECK(order == doctest::Approx(1.0).epsilon(0.15));
    else CHECK(order == doctest::Approx(2.0).epsilon(0.15));
  }
}

TEST_CASE("energy decreases along trajectories") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  SolverConfig c;
  c.T = 0.2;
  const TrajectoryRecord tr = simulate(sample(d, 2), c);
  for (std::size_t i = 1; i < tr.diagnostics.size(); ++i) {
    CHECK(tr.diagnostics[i].l2_norm <= tr.diagnostics[i - 1].l2_norm);
    CHECK(tr.diagnostics[i].orthogonality_residual < 1e-10);
  }
}

TEST_CASE("snapshot stride and time lookup") {
  const DomainSpec d{pi, pi, 4, 4, 8, 8};
  SolverConfig c;
  c.dt = 0.01;
  c.T = 0.1;
  c.snapshot_stride = 3;
  const TrajectoryRecord tr = simulate(SpectralField::eigenfunction(d, 1, 1), c);
  CHECK(tr.times.size() == 5);  // 0, 0.03, 0.06, 0.09, 0.1
  CHECK(tr.index_of_time(0.06) == 2);
  CHECK_THROWS_AS(tr.index_of_time(0.05), ParameterError);
}

TEST_CASE("mild residual vanishes on exact single-mode trajectories") {
  const DomainSpec d{pi, pi, 6, 6, 12, 12};
  SolverConfig c;
  c.dt = 1e-3;
  c.T = 0.05;
  const TrajectoryRecord tr = simulate(SpectralField::eigenfunction(d, 1, 2), c);
  const MildResidual r(tr);
  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 6; ++n) CHECK(r(SpectralField::eigenfunction(d, m, n), 0.05) < 1e-14);
  }
  CHECK_THROWS_AS(r(SpectralField::eigenfunction(d, 1, 1), 0.0123), ParameterError);
  CHECK_THROWS_AS(r(SpectralField(d, Parity::CS), 0.05), ParameterError);
}

TEST_CASE("mild residual converges at second order on two-mode data") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  const SpectralField th = two_mode_field(d, 42, 1, 2.0);
  const SpectralField g = SpectralField::eigenfunction(d, 1, 1) + SpectralField::eigenfunction(d, 2, 1);
  SolverConfig c;
  c.T = 0.1;
  c.dt = 0.01;
  const double r1 = mild_residual(simulate(th, c), g, 0.1);
  c.dt = 0.005;
  const double r2 = mild_residual(simulate(th, c), g, 0.1);
  CHECK(r1 > 0.0);
  CHECK(std::log2(r1 / r2) > 1.8);
}

TEST_CASE("trajectory directory round trip") {
  const DomainSpec d{pi, pi, 6, 6, 12, 12};
  SolverConfig c;
  c.dt = 0.01;
  c.T = 0.05;
  const TrajectoryRecord tr = simulate(sample(d, 1), c);
  const auto dir = std::filesystem::temp_directory_path() / "sqgspec_unit_traj";
  std::filesystem::remove_all(dir);
  save_trajectory(dir, tr);
  const TrajectoryRecord back = load_trajectory(dir);
  CHECK(back.domain == d);
  CHECK(back.config.dt == c.dt);
  CHECK(back.config.scheme == c.scheme);
  REQUIRE(back.snapshots.size() == tr.snapshots.size());
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    CHECK(back.times[i] == tr.times[i]);
    CHECK(max_abs_diff(back.snapshots[i], tr.snapshots[i]) == 0.0);
  }
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_trajectory(dir), PathError);
}

TEST_CASE("explicit blow-up is reported with its time") {
  const DomainSpec d{pi, pi, 8, 8, 16, 16};
  SolverConfig c;
  c.dt = 0.1;
  c.T = 50.0;
  c.scheme = Scheme::IFEuler;
  try {
    simulate(sample(d, 0) * 1e6, c);
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 50.0);
    CHECK(std::isfinite(e.last_l2()));
  }
  CHECK_THROWS_AS(simulate(SpectralField(d, Parity::CS), c), ParameterError);
}
