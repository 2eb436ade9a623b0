// SPDX-License-Identifier: Apache-2.0
#pragma once

// Experiment configuration: one JSON document, overridable by dotted key paths.
//
//   {
//     "domain":      {"L1", "L2", "M1", "M2", "N1", "N2"},
//     "profile":     {"sharpness"},
//     "quadrature":  {"nodes_per_decade", "mu_min", "mu_max", "tail_terms"},
//     "solver":      {"dt", "T", "scheme", "dealias_factor", "snapshot_stride"},
//     "initial":     {"kind": "eigenfunction" | "two-mode" | "random" | "file", "m", "n", "amplitude", "index", "path"},
//     "samples":     {"modes", "decay", "count", "randomize_decay"},
//     "battery":     {"tuples": "default" | [{"s","p","p1","p2","p3","p4","q"}], "probes", "refine_factor"},
//     "multipliers": {"p", "elliptic_p", "refine_factor"},
//     "structure":   {"pairs", "nodes_per_decade"},
//     "duhamel":     {"p", "s", "cases", "smallness_p", "smallness_times"},
//     "uniqueness":  {"dt_b", "scheme_b", "dealias_factor_b"},
//     "output_dir", "seed", "workers"
//   }
//
// Exponents and q accept "inf". Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqgspec/domain.hpp"
#include "sqgspec/harness.hpp"
#include "sqgspec/multiplier.hpp"
#include "sqgspec/sqg.hpp"

namespace sqgspec {

struct InitialSpec {
  std::string kind = "eigenfunction";
  int m = 1;
  int n = 1;
  double amplitude = 1.0;
  int index = 0;     ///< sample / two-mode index
  std::string path;  ///< field file for kind = "file"
};

struct BatterySpec {
  std::vector<BilinearTuple> tuples = default_battery();
  bool probes = true;     ///< also report s = −0.9 and s = 1.9 (never asserted)
  int refine_factor = 2;  ///< grid multiplier of the refinement check; 1 disables it
};

struct MultiplierSpec {
  std::vector<double> p = {1.0, 2.0, std::numeric_limits<double>::infinity()};
  std::vector<double> elliptic_p = {1.5, 2.0, 3.0};
  int refine_factor = 2;
};

struct StructureSpec {
  int pairs = 4;  ///< sample pairs decomposed into single-block (k, l) pairs
  std::vector<int> nodes_per_decade = {4, 8, 16, 32};
};

struct DuhamelSpec {
  double p = 1.5;
  std::optional<double> s;  ///< default −1 + 2/p
  int cases = 20;
  double smallness_p = 1.9;
  std::vector<double> smallness_times;  ///< empty: 41 log-spaced values from 1e-1 down to 1e-6
};

struct UniquenessSpec {
  std::optional<double> dt_b;  ///< default dt/2
  std::optional<Scheme> scheme_b;
  std::optional<int> dealias_factor_b;
};

struct ExperimentConfig {
  DomainSpec domain;
  double profile_sharpness = 1.0;
  QuadratureSpec quadrature;
  SolverConfig solver;
  InitialSpec initial;
  SampleSpec samples;
  BatterySpec battery;
  MultiplierSpec multipliers;
  StructureSpec structure;
  DuhamelSpec duhamel;
  UniquenessSpec uniqueness;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 42;
  int workers = 1;

  DyadicProfile profile() const { return DyadicProfile(profile_sharpness); }
  /// samples with the top-level seed applied
  SampleSpec sample_spec() const;
  SolverConfig solver_b() const;
};

nlohmann::ordered_json to_json(const ExperimentConfig& c);
/// Throws ConfigError naming the offending key.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Applies "a.b.c=value"; value is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Defaults ← file (if given) ← overrides. Throws PathError / ConfigError.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides = {});

/// Empty iff every nested invariant and the bilinear-estimate hypotheses hold.
std::vector<std::string> validate_config(const ExperimentConfig& c);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);
std::string fnv1a_hex(std::string_view bytes);

/// Builds θ₀ from c.initial on c.domain.
SpectralField initial_field(const ExperimentConfig& c);

}  // namespace sqgspec
