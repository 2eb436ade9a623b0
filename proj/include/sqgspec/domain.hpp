// SPDX-License-Identifier: Apache-2.0
#pragma once

// Rectangle [0,L1]×[0,L2], its Dirichlet eigenbasis sin(mπx/L1)sin(nπy/L2),
// the companion cosine families produced by differentiation, and the
// collocation grid used for pointwise products and L^p quadrature.
//
// Conventions
//   Sine family on an axis with M modes:   sin(kπx/L), k = 1..M   (M coefficients)
//   Cosine family on an axis with M modes: cos(kπx/L), k = 0..M   (M+1 coefficients)
//   Grid on an axis with N interior points: x_i = i·L/(N+1), i = 0..N+1
//   (boundary nodes included, trapezoid weights).

#include <array>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sqgspec {

enum class Family { Sine, Cosine };

/// Axis-1 family × axis-2 family. SS is the Dirichlet eigenbasis.
enum class Parity { SS, CS, SC, CC };

Family axis_family(Parity p, int axis);
Parity make_parity(Family axis1, Family axis2);
/// Parity after differentiating along `axis`.
Parity flip_axis(Parity p, int axis);
/// Parity of a pointwise product (sin·sin and cos·cos are cosine series, sin·cos is a sine series).
Parity product_parity(Parity a, Parity b);
std::string_view to_string(Parity p);
Parity parse_parity(std::string_view s);

constexpr int family_count(Family f, int modes) { return f == Family::Sine ? modes : modes + 1; }
constexpr int family_first(Family f) { return f == Family::Sine ? 1 : 0; }

struct DomainSpec {
  double L1 = std::numbers::pi;
  double L2 = std::numbers::pi;
  int M1 = 16;
  int M2 = 16;
  int N1 = 64;
  int N2 = 64;

  /// Human-readable list of violated invariants; empty when valid.
  std::vector<std::string> violations() const;
  /// Throws ParameterError listing the violations.
  void validate() const;

  DomainSpec with_modes(int m1, int m2) const;
  DomainSpec with_grid(int n1, int n2) const;

  double length(int axis) const { return axis == 1 ? L1 : L2; }
  int modes(int axis) const { return axis == 1 ? M1 : M2; }
  int grid(int axis) const { return axis == 1 ? N1 : N2; }
  /// Grid nodes on an axis, boundary nodes included.
  int nodes(int axis) const { return grid(axis) + 2; }
  double spacing(int axis) const { return length(axis) / (grid(axis) + 1); }
  double area() const { return L1 * L2; }

  bool same_geometry(const DomainSpec& o) const { return L1 == o.L1 && L2 == o.L2; }
  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Dirichlet eigenvalue π²(m²/L1² + n²/L2²); throws IndexError outside 1..M.
double eigenvalue(int m, int n, const DomainSpec& d);

/// Coefficients of one parity class on one DomainSpec, row-major with
/// rows = axis-1 family count and cols = axis-2 family count.
class SpectralField {
 public:
  SpectralField(const DomainSpec& d, Parity p);
  SpectralField(const DomainSpec& d, Parity p, std::vector<double> coefficients);

  /// amplitude · sin(mπx/L1) sin(nπy/L2)
  static SpectralField eigenfunction(const DomainSpec& d, int m, int n, double amplitude = 1.0);

  const DomainSpec& domain() const { return domain_; }
  Parity parity() const { return parity_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> coefficients() const { return coeffs_; }
  std::span<double> coefficients() { return coeffs_; }

  double& operator()(std::size_t r, std::size_t c) { return coeffs_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return coeffs_[r * cols_ + c]; }

  /// Access by wavenumber index (k starts at 1 for sine, 0 for cosine).
  double mode(int k1, int k2) const;
  void set_mode(int k1, int k2, double value);

  bool all_finite() const;
  bool is_zero() const;
  /// Same domain (including grid) and parity.
  bool compatible(const SpectralField& o) const;

  /// Same coefficients reinterpreted on a different collocation grid.
  SpectralField regrid(int n1, int n2) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  void require_compatible(const SpectralField& o) const;

  DomainSpec domain_;
  Parity parity_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> coeffs_;
};

/// Values on the closed (N1+2)×(N2+2) collocation grid, row-major in (x_i, y_j).
class GridField {
 public:
  explicit GridField(const DomainSpec& d);
  GridField(const DomainSpec& d, std::vector<double> values);

  const DomainSpec& domain() const { return domain_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  double x(std::size_t i) const { return static_cast<double>(i) * domain_.spacing(1); }
  double y(std::size_t j) const { return static_cast<double>(j) * domain_.spacing(2); }

  bool all_finite() const;
  /// Same grid geometry (lengths and N); mode counts are irrelevant for grid data.
  bool compatible(const GridField& o) const;

  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(double s);
  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(GridField a, double s) { return a *= s; }
  /// Pointwise product.
  friend GridField operator*(const GridField& a, const GridField& b);
  /// this += a ⊙ b
  void add_product(const GridField& a, const GridField& b);

 private:
  void require_compatible(const GridField& o) const;

  DomainSpec domain_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// One axis of a separable basis sampled on the closed grid.
class AxisBasis {
 public:
  AxisBasis(Family family, int modes, double length, int grid);

  Family family() const { return family_; }
  std::size_t count() const { return count_; }
  std::size_t nodes() const { return nodes_; }
  /// nodes × count: b_k(x_i)
  std::span<const double> synthesis() const { return synth_; }
  /// count × nodes
  std::span<const double> synthesis_t() const { return synth_t_; }
  /// count × nodes: w_i b_k(x_i) / ‖b_k‖²
  std::span<const double> analysis() const { return analysis_; }
  /// nodes × count
  std::span<const double> analysis_t() const { return analysis_t_; }

 private:
  Family family_;
  std::size_t count_;
  std::size_t nodes_;
  std::vector<double> synth_;
  std::vector<double> synth_t_;
  std::vector<double> analysis_;
  std::vector<double> analysis_t_;
};

/// Precomputed separable transform between one (DomainSpec, Parity) coefficient
/// layout and the domain's grid. Immutable after construction.
class Transform {
 public:
  Transform(const DomainSpec& d, Parity p);

  const DomainSpec& domain() const { return domain_; }
  Parity parity() const { return parity_; }

  GridField synthesize(const SpectralField& f) const;
  /// Discrete projection; exact for grid data that is band-limited within the grid's resolution.
  SpectralField analyze(const GridField& g) const;

  void synthesize_into(std::span<const double> coeffs, std::span<double> values,
                       std::vector<double>& scratch) const;
  void analyze_into(std::span<const double> values, std::span<double> coeffs,
                    std::vector<double>& scratch) const;

 private:
  DomainSpec domain_;
  Parity parity_;
  AxisBasis ax1_;
  AxisBasis ax2_;
};

GridField synthesize(const SpectralField& f);
/// Projection onto `parity` with the mode counts of g.domain().
SpectralField analyze(const GridField& g, Parity parity);

/// Exact spectral derivative; flips the family on `axis` (1 or 2).
SpectralField partial_derivative(const SpectralField& f, int axis);

/// Composite trapezoid L^p norm; p = +inf gives the grid maximum. Throws ParameterError for p < 1.
double lp_norm(const GridField& g, double p);
/// L^p norm of the pointwise Euclidean magnitude of a vector field.
double lp_norm(std::span<const GridField> components, double p);

/// Trapezoid quadrature of g1·g2. Throws ParameterError on mismatched grids.
double inner_product(const GridField& g1, const GridField& g2);

/// ∫ b_k² over one axis: L/2, or L for the constant cosine.
double basis_norm_sq(Family f, int k, double length);
/// ∫_Ω f g computed from coefficients (Parseval); parities must match.
double coefficient_inner_product(const SpectralField& f, const SpectralField& g);
/// L² norm from coefficients.
double l2_norm(const SpectralField& f);

/// Truncates or zero-pads to new mode counts in the same parity.
SpectralField resize_modes(const SpectralField& f, int m1, int m2);
/// L² projection onto another parity class with the given mode counts; exact
/// (closed-form sine/cosine overlap integrals), not grid based.
SpectralField project_parity(const SpectralField& f, Parity target, int m1, int m2);

}  // namespace sqgspec
