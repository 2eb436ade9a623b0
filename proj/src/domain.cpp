// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sqgspec/error.hpp"
#include "sqgspec/simd.hpp"

namespace sqgspec {

using std::numbers::pi;

Family axis_family(Parity p, int axis) {
  switch (p) {
    case Parity::SS: return Family::Sine;
    case Parity::CC: return Family::Cosine;
    case Parity::CS: return axis == 1 ? Family::Cosine : Family::Sine;
    case Parity::SC: return axis == 1 ? Family::Sine : Family::Cosine;
  }
  return Family::Sine;
}

Parity make_parity(Family a1, Family a2) {
  if (a1 == Family::Sine) return a2 == Family::Sine ? Parity::SS : Parity::SC;
  return a2 == Family::Sine ? Parity::CS : Parity::CC;
}

namespace {
Family other(Family f) { return f == Family::Sine ? Family::Cosine : Family::Sine; }
Family product_family(Family a, Family b) { return a == b ? Family::Cosine : Family::Sine; }
}  // namespace

Parity flip_axis(Parity p, int axis) {
  Family a1 = axis_family(p, 1);
  Family a2 = axis_family(p, 2);
  if (axis == 1) a1 = other(a1); else a2 = other(a2);
  return make_parity(a1, a2);
}

Parity product_parity(Parity a, Parity b) {
  return make_parity(product_family(axis_family(a, 1), axis_family(b, 1)),
                     product_family(axis_family(a, 2), axis_family(b, 2)));
}

std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::SS: return "SS";
    case Parity::CS: return "CS";
    case Parity::SC: return "SC";
    case Parity::CC: return "CC";
  }
  return "??";
}

Parity parse_parity(std::string_view s) {
  if (s == "SS") return Parity::SS;
  if (s == "CS") return Parity::CS;
  if (s == "SC") return Parity::SC;
  if (s == "CC") return Parity::CC;
  throw ParameterError("unknown parity '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// DomainSpec

std::vector<std::string> DomainSpec::violations() const {
  std::vector<std::string> v;
  if (!(L1 > 0.0) || !std::isfinite(L1)) v.emplace_back("domain.L1 must be a positive finite length");
  if (!(L2 > 0.0) || !std::isfinite(L2)) v.emplace_back("domain.L2 must be a positive finite length");
  if (M1 < 1) v.emplace_back("domain.M1 must be >= 1");
  if (M2 < 1) v.emplace_back("domain.M2 must be >= 1");
  if (N1 < M1) v.emplace_back("domain.N1 must be >= domain.M1 (grid must resolve every mode)");
  if (N2 < M2) v.emplace_back("domain.N2 must be >= domain.M2 (grid must resolve every mode)");
  return v;
}

void DomainSpec::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid DomainSpec:";
  for (const auto& s : v) os << ' ' << s << ';';
  throw ParameterError(os.str());
}

DomainSpec DomainSpec::with_modes(int m1, int m2) const {
  DomainSpec d = *this;
  d.M1 = m1;
  d.M2 = m2;
  return d;
}

DomainSpec DomainSpec::with_grid(int n1, int n2) const {
  DomainSpec d = *this;
  d.N1 = n1;
  d.N2 = n2;
  return d;
}

double eigenvalue(int m, int n, const DomainSpec& d) {
  if (m < 1 || m > d.M1 || n < 1 || n > d.M2) {
    std::ostringstream os;
    os << "eigenvalue index (" << m << ',' << n << ") outside 1.." << d.M1 << " × 1.." << d.M2;
    throw IndexError(os.str());
  }
  const double a = m / d.L1;
  const double b = n / d.L2;
  return pi * pi * (a * a + b * b);
}

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(const DomainSpec& d, Parity p)
    : domain_(d),
      parity_(p),
      rows_(static_cast<std::size_t>(family_count(axis_family(p, 1), d.M1))),
      cols_(static_cast<std::size_t>(family_count(axis_family(p, 2), d.M2))),
      coeffs_(rows_ * cols_, 0.0) {}

SpectralField::SpectralField(const DomainSpec& d, Parity p, std::vector<double> coefficients)
    : SpectralField(d, p) {
  if (coefficients.size() != coeffs_.size()) {
    std::ostringstream os;
    os << "coefficient array has " << coefficients.size() << " entries, expected " << rows_
       << " × " << cols_;
    throw ParameterError(os.str());
  }
  coeffs_ = std::move(coefficients);
}

SpectralField SpectralField::eigenfunction(const DomainSpec& d, int m, int n, double amplitude) {
  SpectralField f(d, Parity::SS);
  f.set_mode(m, n, amplitude);
  return f;
}

double SpectralField::mode(int k1, int k2) const {
  const int r = k1 - family_first(axis_family(parity_, 1));
  const int c = k2 - family_first(axis_family(parity_, 2));
  if (r < 0 || c < 0 || r >= static_cast<int>(rows_) || c >= static_cast<int>(cols_)) {
    throw IndexError("mode index outside the truncated basis");
  }
  return (*this)(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
}

void SpectralField::set_mode(int k1, int k2, double value) {
  const int r = k1 - family_first(axis_family(parity_, 1));
  const int c = k2 - family_first(axis_family(parity_, 2));
  if (r < 0 || c < 0 || r >= static_cast<int>(rows_) || c >= static_cast<int>(cols_)) {
    throw IndexError("mode index outside the truncated basis");
  }
  (*this)(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = value;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return std::isfinite(v); });
}

bool SpectralField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return v == 0.0; });
}

bool SpectralField::compatible(const SpectralField& o) const {
  return domain_ == o.domain_ && parity_ == o.parity_;
}

void SpectralField::require_compatible(const SpectralField& o) const {
  if (!compatible(o)) throw ParameterError("spectral fields differ in domain or parity");
}

SpectralField SpectralField::regrid(int n1, int n2) const {
  SpectralField f = *this;
  f.domain_ = domain_.with_grid(n1, n2);
  return f;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_compatible(o);
  simd::axpy(1.0, o.coeffs_, coeffs_);
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_compatible(o);
  simd::axpy(-1.0, o.coeffs_, coeffs_);
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& v : coeffs_) v *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// GridField

GridField::GridField(const DomainSpec& d)
    : domain_(d),
      rows_(static_cast<std::size_t>(d.nodes(1))),
      cols_(static_cast<std::size_t>(d.nodes(2))),
      values_(rows_ * cols_, 0.0) {}

GridField::GridField(const DomainSpec& d, std::vector<double> values) : GridField(d) {
  if (values.size() != values_.size()) throw ParameterError("grid value array has the wrong size");
  values_ = std::move(values);
}

bool GridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool GridField::compatible(const GridField& o) const {
  return domain_.same_geometry(o.domain_) && domain_.N1 == o.domain_.N1 &&
         domain_.N2 == o.domain_.N2;
}

void GridField::require_compatible(const GridField& o) const {
  if (!compatible(o)) throw ParameterError("grid fields live on different grids");
}

GridField& GridField::operator+=(const GridField& o) {
  require_compatible(o);
  simd::axpy(1.0, o.values_, values_);
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  require_compatible(o);
  simd::axpy(-1.0, o.values_, values_);
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridField operator*(const GridField& a, const GridField& b) {
  a.require_compatible(b);
  GridField out(a.domain_);
  simd::mul(a.values_, b.values_, out.values_);
  return out;
}

void GridField::add_product(const GridField& a, const GridField& b) {
  require_compatible(a);
  require_compatible(b);
  simd::fma_acc(a.values_, b.values_, values_);
}

// ---------------------------------------------------------------------------
// Transforms

double basis_norm_sq(Family f, int k, double length) {
  return (f == Family::Cosine && k == 0) ? length : 0.5 * length;
}

AxisBasis::AxisBasis(Family family, int modes, double length, int grid)
    : family_(family),
      count_(static_cast<std::size_t>(family_count(family, modes))),
      nodes_(static_cast<std::size_t>(grid + 2)),
      synth_(nodes_ * count_),
      synth_t_(count_ * nodes_),
      analysis_(count_ * nodes_),
      analysis_t_(nodes_ * count_) {
  const double h = length / (grid + 1);
  const int first = family_first(family);
  const long K = grid + 1;
  for (std::size_t i = 0; i < nodes_; ++i) {
    const double w = (i == 0 || i + 1 == nodes_) ? 0.5 * h : h;
    for (std::size_t s = 0; s < count_; ++s) {
      const long k = first + static_cast<long>(s);
      // Reduce k·i mod 2K so the argument stays in [0, 2π).
      const long phase = (k * static_cast<long>(i)) % (2 * K);
      const double arg = pi * static_cast<double>(phase) / static_cast<double>(K);
      double b;
      if (family == Family::Sine) {
        b = (phase == 0 || phase == K) ? 0.0 : std::sin(arg);
      } else {
        b = std::cos(arg);
        if (2 * phase == K || 2 * phase == 3 * K) b = 0.0;
      }
      synth_[i * count_ + s] = b;
      synth_t_[s * nodes_ + i] = b;
      const double a = w * b / basis_norm_sq(family, static_cast<int>(k), length);
      analysis_[s * nodes_ + i] = a;
      analysis_t_[i * count_ + s] = a;
    }
  }
}

Transform::Transform(const DomainSpec& d, Parity p)
    : domain_(d),
      parity_(p),
      ax1_(axis_family(p, 1), d.M1, d.L1, d.N1),
      ax2_(axis_family(p, 2), d.M2, d.L2, d.N2) {}

void Transform::synthesize_into(std::span<const double> coeffs, std::span<double> values,
                                std::vector<double>& scratch) const {
  const std::size_t r = ax1_.count(), c = ax2_.count();
  const std::size_t g1 = ax1_.nodes(), g2 = ax2_.nodes();
  scratch.resize(r * g2);
  const auto& k = simd::kernels();
  // T(r×g2) = C(r×c) · B2ᵀ(c×g2);  V(g1×g2) = B1(g1×r) · T
  k.gemm(r, g2, c, coeffs.data(), c, ax2_.synthesis_t().data(), g2, scratch.data(), g2);
  k.gemm(g1, g2, r, ax1_.synthesis().data(), r, scratch.data(), g2, values.data(), g2);
}

void Transform::analyze_into(std::span<const double> values, std::span<double> coeffs,
                             std::vector<double>& scratch) const {
  const std::size_t r = ax1_.count(), c = ax2_.count();
  const std::size_t g1 = ax1_.nodes(), g2 = ax2_.nodes();
  scratch.resize(g1 * c);
  const auto& k = simd::kernels();
  // T(g1×c) = V(g1×g2) · A2ᵀ(g2×c);  C(r×c) = A1(r×g1) · T
  k.gemm(g1, c, g2, values.data(), g2, ax2_.analysis_t().data(), c, scratch.data(), c);
  k.gemm(r, c, g1, ax1_.analysis().data(), g1, scratch.data(), c, coeffs.data(), c);
}

GridField Transform::synthesize(const SpectralField& f) const {
  if (f.parity() != parity_ || f.domain().M1 != domain_.M1 || f.domain().M2 != domain_.M2 ||
      !f.domain().same_geometry(domain_)) {
    throw ParameterError("field does not match the transform's modes or parity");
  }
  GridField g(domain_);
  std::vector<double> scratch;
  synthesize_into(f.coefficients(), g.values(), scratch);
  return g;
}

SpectralField Transform::analyze(const GridField& g) const {
  if (!g.domain().same_geometry(domain_) || g.domain().N1 != domain_.N1 ||
      g.domain().N2 != domain_.N2) {
    throw ParameterError("grid does not match the transform's grid");
  }
  SpectralField f(domain_, parity_);
  std::vector<double> scratch;
  analyze_into(g.values(), f.coefficients(), scratch);
  return f;
}

GridField synthesize(const SpectralField& f) { return Transform(f.domain(), f.parity()).synthesize(f); }

SpectralField analyze(const GridField& g, Parity parity) {
  return Transform(g.domain(), parity).analyze(g);
}

SpectralField partial_derivative(const SpectralField& f, int axis) {
  if (axis != 1 && axis != 2) throw ParameterError("derivative axis must be 1 or 2");
  const DomainSpec& d = f.domain();
  const Parity out_p = flip_axis(f.parity(), axis);
  SpectralField out(d, out_p);
  const Family from = axis_family(f.parity(), axis);
  const double kscale = pi / d.length(axis);
  const int first_in = family_first(from);
  const int first_out = family_first(other(from));
  const double sign = from == Family::Sine ? 1.0 : -1.0;

  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      const std::size_t idx_out = axis == 1 ? r : c;
      const int k = first_out + static_cast<int>(idx_out);
      const int idx_in = k - first_in;
      const int n_in = static_cast<int>(axis == 1 ? f.rows() : f.cols());
      if (k == 0 || idx_in < 0 || idx_in >= n_in) continue;
      const double v = axis == 1 ? f(static_cast<std::size_t>(idx_in), c)
                                 : f(r, static_cast<std::size_t>(idx_in));
      out(r, c) = sign * k * kscale * v;
    }
  }
  return out;
}

namespace {

std::vector<double> trapezoid_weights(int grid, double length) {
  const std::size_t n = static_cast<std::size_t>(grid + 2);
  const double h = length / (grid + 1);
  std::vector<double> w(n, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

void require_p(double p) {
  if (!(p >= 1.0)) throw ParameterError("L^p exponent must satisfy p >= 1");
}

// Σ_ij w1_i w2_j |v_ij|^p for a row-major grid.
double weighted_power_sum(std::span<const double> v, std::size_t rows, std::size_t cols,
                          const std::vector<double>& w1, const std::vector<double>& w2, double p) {
  const auto& k = simd::kernels();
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = v.data() + i * cols;
    double s;
    if (p == 1.0) {
      s = k.wsum_abs(row, w2.data(), cols);
    } else if (p == 2.0) {
      s = k.wsum_sq(row, w2.data(), cols);
    } else if (p == std::floor(p) && p <= 8.0) {
      const int n = static_cast<int>(p);
      s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        const double a = std::fabs(row[j]);
        double t = a;
        for (int e = 1; e < n; ++e) t *= a;
        s += w2[j] * t;
      }
    } else {
      s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += w2[j] * std::pow(std::fabs(row[j]), p);
    }
    total += w1[i] * s;
  }
  return total;
}

}  // namespace

double lp_norm(const GridField& g, double p) {
  require_p(p);
  if (std::isinf(p)) return simd::max_abs(g.values());
  const auto w1 = trapezoid_weights(g.domain().N1, g.domain().L1);
  const auto w2 = trapezoid_weights(g.domain().N2, g.domain().L2);
  const double s = weighted_power_sum(g.values(), g.rows(), g.cols(), w1, w2, p);
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

double lp_norm(std::span<const GridField> components, double p) {
  require_p(p);
  if (components.empty()) return 0.0;
  if (components.size() == 1) return lp_norm(components.front(), p);
  GridField mag(components.front().domain());
  for (const auto& c : components) mag.add_product(c, c);
  for (double& v : mag.values()) v = std::sqrt(v);
  return lp_norm(mag, p);
}

double inner_product(const GridField& g1, const GridField& g2) {
  if (!g1.compatible(g2)) throw ParameterError("inner product of fields on different grids");
  const auto w1 = trapezoid_weights(g1.domain().N1, g1.domain().L1);
  const auto w2 = trapezoid_weights(g1.domain().N2, g1.domain().L2);
  const auto& k = simd::kernels();
  std::vector<double> row(g1.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < g1.rows(); ++i) {
    k.mul(g1.values().data() + i * g1.cols(), w2.data(), row.data(), g1.cols());
    total += w1[i] * k.dot(row.data(), g2.values().data() + i * g2.cols(), g1.cols());
  }
  return total;
}

double coefficient_inner_product(const SpectralField& f, const SpectralField& g) {
  if (f.parity() != g.parity() || !f.domain().same_geometry(g.domain()) ||
      f.domain().M1 != g.domain().M1 || f.domain().M2 != g.domain().M2) {
    throw ParameterError("coefficient inner product needs matching parity and modes");
  }
  const Family a1 = axis_family(f.parity(), 1), a2 = axis_family(f.parity(), 2);
  const int f1 = family_first(a1), f2 = family_first(a2);
  const double L1 = f.domain().L1, L2 = f.domain().L2;
  double total = 0.0;
  for (std::size_t r = 0; r < f.rows(); ++r) {
    const double n1 = basis_norm_sq(a1, f1 + static_cast<int>(r), L1);
    double row = 0.0;
    for (std::size_t c = 0; c < f.cols(); ++c) {
      row += basis_norm_sq(a2, f2 + static_cast<int>(c), L2) * f(r, c) * g(r, c);
    }
    total += n1 * row;
  }
  return total;
}

double l2_norm(const SpectralField& f) { return std::sqrt(coefficient_inner_product(f, f)); }

SpectralField resize_modes(const SpectralField& f, int m1, int m2) {
  SpectralField out(f.domain().with_modes(m1, m2), f.parity());
  const std::size_t r = std::min(out.rows(), f.rows());
  const std::size_t c = std::min(out.cols(), f.cols());
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out(i, j) = f(i, j);
  }
  return out;
}

namespace {

// Row-major (target count × source count) matrix mapping coefficients of one
// family to the L² projection onto another on the same axis.
std::vector<double> family_transfer(Family from, int from_modes, Family to, int to_modes) {
  const int nf = family_count(from, from_modes), nt = family_count(to, to_modes);
  const int ff = family_first(from), ft = family_first(to);
  std::vector<double> t(static_cast<std::size_t>(nt * nf), 0.0);
  for (int a = 0; a < nt; ++a) {
    const int kt = ft + a;
    for (int b = 0; b < nf; ++b) {
      const int ks = ff + b;
      double v = 0.0;
      if (from == to) {
        v = (kt == ks) ? 1.0 : 0.0;
      } else if (kt != ks && ((kt + ks) % 2 != 0)) {
        // ∫_0^L sin(nπx/L) cos(aπx/L) dx = (L/π) · 2n / (n² − a²) for n + a odd, else 0.
        const int n = from == Family::Sine ? ks : kt;  // sine index
        const int c = from == Family::Sine ? kt : ks;  // cosine index
        const double overlap_over_L = 2.0 * n / (pi * (static_cast<double>(n) * n - static_cast<double>(c) * c));
        v = overlap_over_L / (basis_norm_sq(to, kt, 1.0));
      }
      t[static_cast<std::size_t>(a * nf + b)] = v;
    }
  }
  return t;
}

}  // namespace

SpectralField project_parity(const SpectralField& f, Parity target, int m1, int m2) {
  const DomainSpec d = f.domain().with_modes(m1, m2);
  SpectralField out(d, target);
  const auto t1 = family_transfer(axis_family(f.parity(), 1), f.domain().M1, axis_family(target, 1), m1);
  const auto t2 = family_transfer(axis_family(f.parity(), 2), f.domain().M2, axis_family(target, 2), m2);
  const std::size_t r_in = f.rows(), c_in = f.cols();
  const std::size_t r_out = out.rows(), c_out = out.cols();
  // out = T1 · F · T2ᵀ
  std::vector<double> t2t(c_in * c_out);
  for (std::size_t a = 0; a < c_out; ++a) {
    for (std::size_t b = 0; b < c_in; ++b) t2t[b * c_out + a] = t2[a * c_in + b];
  }
  std::vector<double> tmp(r_in * c_out);
  const auto& k = simd::kernels();
  k.gemm(r_in, c_out, c_in, f.coefficients().data(), c_in, t2t.data(), c_out, tmp.data(), c_out);
  k.gemm(r_out, c_out, r_in, t1.data(), r_in, tmp.data(), c_out, out.coefficients().data(), c_out);
  return out;
}

}  // namespace sqgspec
