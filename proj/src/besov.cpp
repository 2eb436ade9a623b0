// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/besov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "sqgspec/error.hpp"

namespace sqgspec {

std::vector<std::string> BesovParams::violations() const {
  std::vector<std::string> v;
  if (!std::isfinite(s)) v.emplace_back("Besov regularity s must be finite");
  if (!(p >= 1.0)) v.emplace_back("Besov integrability p must be >= 1");
  if (!(q >= 1.0)) v.emplace_back("Besov summability q must be >= 1");
  return v;
}

double conjugate_exponent(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

BesovParams BesovParams::dual() const { return {-s, conjugate_exponent(p), conjugate_exponent(q)}; }

double lq_norm(std::span<const double> terms, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double t : terms) m = std::max(m, t);
    return m;
  }
  // Scale by the maximum to avoid overflow for large q.
  double m = 0.0;
  for (double t : terms) m = std::max(m, t);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double t : terms) s += std::pow(t / m, q);
  return m * std::pow(s, 1.0 / q);
}

std::size_t BlockNorms::index_of(double p) const {
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] == p) return i;
  }
  throw ParameterError("exponent not present in block norm table");
}

BesovResult BlockNorms::besov(std::size_t pi, double s, double q) const {
  BesovResult r;
  std::vector<double> weighted;
  for (int j = range.min; j <= range.max; ++j) {
    const double b = norms.at(pi)[static_cast<std::size_t>(j - range.min)];
    const double w = std::pow(2.0, s * j) * b;
    r.profile.push_back({j, b, w});
    weighted.push_back(w);
  }
  r.norm = lq_norm(weighted, q);
  return r;
}

BlockNorms block_lp_norms(std::span<const SpectralField> components, std::span<const double> exponents,
                          const DyadicProfile& profile, std::optional<JRange> range) {
  if (components.empty()) throw ParameterError("block norms need at least one component");
  const DomainSpec& d = components.front().domain();
  for (const auto& c : components) {
    if (!c.compatible(components.front()) || c.parity() != Parity::SS) {
      throw ParameterError("block norms need SS components on a common domain");
    }
  }
  for (double p : exponents) {
    if (!(p >= 1.0)) throw ParameterError("L^p exponent must satisfy p >= 1");
  }
  BlockNorms out;
  out.range = range.value_or(resolved_j_range(d));
  out.exponents.assign(exponents.begin(), exponents.end());
  const std::size_t nj = static_cast<std::size_t>(out.range.max - out.range.min + 1);
  out.norms.assign(exponents.size(), std::vector<double>(nj, 0.0));

  const Transform tr(d, Parity::SS);
  std::vector<GridField> grids(components.size(), GridField(d));
  std::vector<double> scratch;
  for (int j = out.range.min; j <= out.range.max; ++j) {
    bool nonzero = false;
    for (std::size_t c = 0; c < components.size(); ++c) {
      const SpectralField block = dyadic_block(components[c], j, profile);
      nonzero = nonzero || !block.is_zero();
      tr.synthesize_into(block.coefficients(), grids[c].values(), scratch);
    }
    if (!nonzero) continue;
    for (std::size_t pi = 0; pi < exponents.size(); ++pi) {
      out.norms[pi][static_cast<std::size_t>(j - out.range.min)] = lp_norm(grids, exponents[pi]);
    }
  }
  return out;
}

BesovResult besov_norm(std::span<const SpectralField> components, const BesovParams& params,
                       const DyadicProfile& profile, std::optional<JRange> range) {
  const auto v = params.violations();
  if (!v.empty()) throw ParameterError(v.front());
  const double p[] = {params.p};
  return block_lp_norms(components, p, profile, range).besov(0, params.s, params.q);
}

BesovResult besov_norm(const SpectralField& f, const BesovParams& params, const DyadicProfile& profile,
                       std::optional<JRange> range) {
  return besov_norm(std::span<const SpectralField>(&f, 1), params, profile, range);
}

double dual_norm_lower_bound(const SpectralField& f, const BesovParams& dual_params,
                             std::span<const SpectralField> candidates, const DyadicProfile& profile) {
  if (candidates.empty()) throw ParameterError("dual norm estimate needs at least one candidate");
  const GridField fg = synthesize(f);
  double best = 0.0;
  for (const auto& g : candidates) {
    if (g.is_zero()) continue;
    const double denom = besov_norm(g, dual_params, profile).norm;
    if (!(denom > 0.0)) continue;
    const double pairing = std::fabs(inner_product(fg, synthesize(g)));
    best = std::max(best, pairing / denom);
  }
  return best;
}

std::optional<double> embedding_check(const SpectralField& f, const BesovParams& a,
                                      const BesovParams& b, const DyadicProfile& profile) {
  const double na = besov_norm(f, a, profile).norm;
  if (!(na > 0.0)) return std::nullopt;
  return besov_norm(f, b, profile).norm / na;
}

void write_besov_csv(std::ostream& os, const BesovResult& r) {
  os << "j,block_lp_norm,weighted_term\n";
  os.precision(17);
  for (const auto& t : r.profile) os << t.j << ',' << t.block_lp_norm << ',' << t.weighted_term << '\n';
}

}  // namespace sqgspec
