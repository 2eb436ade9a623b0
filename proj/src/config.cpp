// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "sqgspec/error.hpp"
#include "sqgspec/field_io.hpp"

namespace sqgspec {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ordered_json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json num_list(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

double as_double(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "+inf") return kInf;
    if (s == "-inf" || s == "-infinity") return -kInf;
  }
  throw ConfigError(path, "expected a number or \"inf\"");
}

long long as_int(const json& v, const std::string& path) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(path, "expected an integer");
}

/// Object view that records which keys were read and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }
  ~Section() = default;

  std::string key_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const json* find(const std::string& k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void read(const std::string& k, double& out) {
    if (const json* v = find(k)) out = as_double(*v, key_path(k));
  }
  void read(const std::string& k, int& out) {
    if (const json* v = find(k)) out = static_cast<int>(as_int(*v, key_path(k)));
  }
  void read(const std::string& k, std::uint64_t& out) {
    if (const json* v = find(k)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else {
        const long long x = as_int(*v, key_path(k));
        if (x < 0) throw ConfigError(key_path(k), "expected a nonnegative integer");
        out = static_cast<std::uint64_t>(x);
      }
    }
  }
  void read(const std::string& k, bool& out) {
    if (const json* v = find(k)) {
      if (!v->is_boolean()) throw ConfigError(key_path(k), "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const std::string& k, std::string& out) {
    if (const json* v = find(k)) {
      if (!v->is_string()) throw ConfigError(key_path(k), "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const std::string& k, std::optional<double>& out) {
    seen_.insert(k);
    auto it = j_.find(k);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
    } else {
      out = as_double(*it, key_path(k));
    }
  }
  void read(const std::string& k, std::optional<int>& out) {
    seen_.insert(k);
    auto it = j_.find(k);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
    } else {
      out = static_cast<int>(as_int(*it, key_path(k)));
    }
  }
  void read(const std::string& k, std::vector<double>& out) {
    if (const json* v = find(k)) {
      if (!v->is_array()) throw ConfigError(key_path(k), "expected an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_double((*v)[i], key_path(k) + "[" + std::to_string(i) + "]"));
    }
  }
  void read(const std::string& k, std::vector<int>& out) {
    if (const json* v = find(k)) {
      if (!v->is_array()) throw ConfigError(key_path(k), "expected an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        out.push_back(static_cast<int>(as_int((*v)[i], key_path(k) + "[" + std::to_string(i) + "]")));
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Fn>
void section(Section& parent, const std::string& key, Fn&& fn) {
  if (const json* v = parent.find(key)) {
    Section s(*v, parent.key_path(key));
    fn(s);
    s.finish();
  }
}

BilinearTuple tuple_from_json(const json& v, const std::string& path) {
  Section s(v, path);
  BilinearTuple t;
  s.read("s", t.s);
  s.read("p", t.p);
  s.read("p1", t.p1);
  s.read("p2", t.p2);
  s.read("p3", t.p3);
  s.read("p4", t.p4);
  s.read("q", t.q);
  s.finish();
  return t;
}

Scheme scheme_from(const std::string& s, const std::string& path) {
  try {
    return parse_scheme(s);
  } catch (const Error&) {
    throw ConfigError(path, "unknown scheme '" + s + "' (IF-Euler or ETD2)");
  }
}

}  // namespace

SampleSpec ExperimentConfig::sample_spec() const {
  SampleSpec s = samples;
  s.seed = seed;
  return s;
}

SolverConfig ExperimentConfig::solver_b() const {
  SolverConfig b = solver;
  b.dt = uniqueness.dt_b.value_or(solver.dt / 2.0);
  if (uniqueness.scheme_b) b.scheme = *uniqueness.scheme_b;
  if (uniqueness.dealias_factor_b) b.dealias_factor = *uniqueness.dealias_factor_b;
  if (!uniqueness.dt_b) b.snapshot_stride = 2 * solver.snapshot_stride;
  return b;
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["domain"] = {{"L1", c.domain.L1}, {"L2", c.domain.L2}, {"M1", c.domain.M1},
                 {"M2", c.domain.M2}, {"N1", c.domain.N1}, {"N2", c.domain.N2}};
  j["profile"] = {{"sharpness", c.profile_sharpness}};
  j["quadrature"] = {{"nodes_per_decade", c.quadrature.nodes_per_decade},
                     {"mu_min", c.quadrature.mu_min},
                     {"mu_max", c.quadrature.mu_max},
                     {"tail_terms", c.quadrature.tail_terms}};
  j["solver"] = {{"dt", c.solver.dt},
                 {"T", c.solver.T},
                 {"scheme", std::string(to_string(c.solver.scheme))},
                 {"dealias_factor", c.solver.dealias_factor},
                 {"snapshot_stride", c.solver.snapshot_stride}};
  j["initial"] = {{"kind", c.initial.kind},   {"m", c.initial.m},         {"n", c.initial.n},
                  {"amplitude", c.initial.amplitude}, {"index", c.initial.index}, {"path", c.initial.path}};
  j["samples"] = {{"modes", c.samples.modes},
                  {"decay", c.samples.decay},
                  {"count", c.samples.count},
                  {"randomize_decay", c.samples.randomize_decay}};
  ordered_json tuples = ordered_json::array();
  for (const auto& t : c.battery.tuples) {
    tuples.push_back({{"s", t.s}, {"p", num(t.p)}, {"p1", num(t.p1)}, {"p2", num(t.p2)},
                      {"p3", num(t.p3)}, {"p4", num(t.p4)}, {"q", num(t.q)}});
  }
  j["battery"] = {{"tuples", tuples}, {"probes", c.battery.probes}, {"refine_factor", c.battery.refine_factor}};
  j["multipliers"] = {{"p", num_list(c.multipliers.p)},
                      {"elliptic_p", num_list(c.multipliers.elliptic_p)},
                      {"refine_factor", c.multipliers.refine_factor}};
  j["structure"] = {{"pairs", c.structure.pairs}, {"nodes_per_decade", c.structure.nodes_per_decade}};
  j["duhamel"] = {{"p", c.duhamel.p},
                  {"s", c.duhamel.s ? ordered_json(*c.duhamel.s) : ordered_json()},
                  {"cases", c.duhamel.cases},
                  {"smallness_p", c.duhamel.smallness_p},
                  {"smallness_times", num_list(c.duhamel.smallness_times)}};
  j["uniqueness"] = {
      {"dt_b", c.uniqueness.dt_b ? ordered_json(*c.uniqueness.dt_b) : ordered_json()},
      {"scheme_b", c.uniqueness.scheme_b ? ordered_json(std::string(to_string(*c.uniqueness.scheme_b))) : ordered_json()},
      {"dealias_factor_b", c.uniqueness.dealias_factor_b ? ordered_json(*c.uniqueness.dealias_factor_b) : ordered_json()}};
  j["output_dir"] = c.output_dir.generic_string();
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Section root(j, "");
  section(root, "domain", [&](Section& s) {
    s.read("L1", c.domain.L1);
    s.read("L2", c.domain.L2);
    s.read("M1", c.domain.M1);
    s.read("M2", c.domain.M2);
    s.read("N1", c.domain.N1);
    s.read("N2", c.domain.N2);
  });
  section(root, "profile", [&](Section& s) { s.read("sharpness", c.profile_sharpness); });
  section(root, "quadrature", [&](Section& s) {
    s.read("nodes_per_decade", c.quadrature.nodes_per_decade);
    s.read("mu_min", c.quadrature.mu_min);
    s.read("mu_max", c.quadrature.mu_max);
    s.read("tail_terms", c.quadrature.tail_terms);
  });
  section(root, "solver", [&](Section& s) {
    s.read("dt", c.solver.dt);
    s.read("T", c.solver.T);
    std::string scheme(to_string(c.solver.scheme));
    s.read("scheme", scheme);
    c.solver.scheme = scheme_from(scheme, s.key_path("scheme"));
    s.read("dealias_factor", c.solver.dealias_factor);
    s.read("snapshot_stride", c.solver.snapshot_stride);
  });
  section(root, "initial", [&](Section& s) {
    s.read("kind", c.initial.kind);
    s.read("m", c.initial.m);
    s.read("n", c.initial.n);
    s.read("amplitude", c.initial.amplitude);
    s.read("index", c.initial.index);
    s.read("path", c.initial.path);
  });
  section(root, "samples", [&](Section& s) {
    s.read("modes", c.samples.modes);
    s.read("decay", c.samples.decay);
    s.read("count", c.samples.count);
    s.read("randomize_decay", c.samples.randomize_decay);
  });
  section(root, "battery", [&](Section& s) {
    if (const json* t = s.find("tuples")) {
      if (t->is_string() && t->get<std::string>() == "default") {
        c.battery.tuples = default_battery();
      } else if (t->is_array()) {
        c.battery.tuples.clear();
        for (std::size_t i = 0; i < t->size(); ++i) {
          c.battery.tuples.push_back(tuple_from_json((*t)[i], s.key_path("tuples") + "[" + std::to_string(i) + "]"));
        }
      } else {
        throw ConfigError(s.key_path("tuples"), "expected \"default\" or an array of tuples");
      }
    }
    s.read("probes", c.battery.probes);
    s.read("refine_factor", c.battery.refine_factor);
  });
  section(root, "multipliers", [&](Section& s) {
    s.read("p", c.multipliers.p);
    s.read("elliptic_p", c.multipliers.elliptic_p);
    s.read("refine_factor", c.multipliers.refine_factor);
  });
  section(root, "structure", [&](Section& s) {
    s.read("pairs", c.structure.pairs);
    s.read("nodes_per_decade", c.structure.nodes_per_decade);
  });
  section(root, "duhamel", [&](Section& s) {
    s.read("p", c.duhamel.p);
    s.read("s", c.duhamel.s);
    s.read("cases", c.duhamel.cases);
    s.read("smallness_p", c.duhamel.smallness_p);
    s.read("smallness_times", c.duhamel.smallness_times);
  });
  section(root, "uniqueness", [&](Section& s) {
    s.read("dt_b", c.uniqueness.dt_b);
    std::string scheme;
    s.read("scheme_b", scheme);
    if (!scheme.empty()) c.uniqueness.scheme_b = scheme_from(scheme, s.key_path("scheme_b"));
    s.read("dealias_factor_b", c.uniqueness.dealias_factor_b);
  });
  std::string out = c.output_dir.generic_string();
  root.read("output_dir", out);
  c.output_dir = out;
  root.read("seed", c.seed);
  root.read("workers", c.workers);
  root.finish();
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must have the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(key, "empty component in key path");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError(key.substr(0, start == 0 ? 0 : start - 1), "not an object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (path) {
    std::ifstream is(*path);
    if (!is) throw PathError("cannot read config '" + path->string() + "'");
    try {
      doc = json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError(path->string(), std::string("parse error: ") + e.what());
    }
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc);
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> v;
  auto add = [&](const std::string& prefix, const std::vector<std::string>& items) {
    for (const auto& s : items) v.push_back(prefix + ": " + s);
  };
  add("domain", c.domain.violations());
  if (!(c.profile_sharpness >= DyadicProfile::kMinSharpness && c.profile_sharpness <= DyadicProfile::kMaxSharpness)) {
    v.push_back("profile.sharpness: must lie in [1, 8]");
  }
  add("quadrature", c.quadrature.violations());
  add("solver", c.solver.violations());
  add("samples", c.samples.violations());

  const auto& ini = c.initial;
  if (ini.kind == "eigenfunction") {
    if (ini.m < 1 || ini.m > c.domain.M1 || ini.n < 1 || ini.n > c.domain.M2) {
      v.push_back("initial: eigenfunction index (m, n) outside 1..M");
    }
  } else if (ini.kind == "two-mode" || ini.kind == "random") {
    if (ini.index < 0) v.push_back("initial.index: must be >= 0");
  } else if (ini.kind == "file") {
    if (ini.path.empty()) v.push_back("initial.path: required for kind \"file\"");
  } else {
    v.push_back("initial.kind: unknown kind '" + ini.kind + "'");
  }
  if (!std::isfinite(ini.amplitude)) v.push_back("initial.amplitude: must be finite");

  for (std::size_t i = 0; i < c.battery.tuples.size(); ++i) {
    add("battery.tuples[" + std::to_string(i) + "] (" + c.battery.tuples[i].label() + ")",
        c.battery.tuples[i].violations());
  }
  if (c.battery.refine_factor < 1) v.push_back("battery.refine_factor: must be >= 1");
  for (double p : c.multipliers.p) {
    if (!(p >= 1.0)) v.push_back("multipliers.p: exponents must be >= 1");
  }
  for (double p : c.multipliers.elliptic_p) {
    if (!(p > 1.0 && std::isfinite(p))) v.push_back("multipliers.elliptic_p: exponents must satisfy 1 < p < inf");
  }
  if (c.multipliers.refine_factor < 1) v.push_back("multipliers.refine_factor: must be >= 1");
  if (c.structure.pairs < 1) v.push_back("structure.pairs: must be >= 1");
  if (c.structure.nodes_per_decade.empty()) v.push_back("structure.nodes_per_decade: must not be empty");
  for (int n : c.structure.nodes_per_decade) {
    if (n < 1) v.push_back("structure.nodes_per_decade: entries must be >= 1");
  }
  if (!(c.duhamel.p > 1.0 && c.duhamel.p < 2.0)) v.push_back("duhamel.p: must satisfy 1 < p < 2");
  if (c.duhamel.s && !std::isfinite(*c.duhamel.s)) v.push_back("duhamel.s: must be finite");
  if (c.duhamel.cases < 1) v.push_back("duhamel.cases: must be >= 1");
  if (!(c.duhamel.smallness_p > 1.0 && c.duhamel.smallness_p < 2.0)) {
    v.push_back("duhamel.smallness_p: must satisfy 1 < p < 2");
  }
  for (double t : c.duhamel.smallness_times) {
    if (!(t >= 0.0 && std::isfinite(t))) v.push_back("duhamel.smallness_times: entries must be finite and >= 0");
  }
  if (c.uniqueness.dt_b && !(*c.uniqueness.dt_b > 0.0)) v.push_back("uniqueness.dt_b: must be > 0");
  if (c.uniqueness.dealias_factor_b && *c.uniqueness.dealias_factor_b < 2) {
    v.push_back("uniqueness.dealias_factor_b: must be >= 2");
  }
  if (c.output_dir.empty()) v.push_back("output_dir: must not be empty");
  if (c.workers < 1) v.push_back("workers: must be >= 1");
  return v;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(to_json(c).dump()); }

SpectralField initial_field(const ExperimentConfig& c) {
  const auto& ini = c.initial;
  if (ini.kind == "eigenfunction") return SpectralField::eigenfunction(c.domain, ini.m, ini.n, ini.amplitude);
  if (ini.kind == "two-mode") return two_mode_field(c.domain, c.seed, ini.index, ini.amplitude);
  if (ini.kind == "random") {
    SampleSpec s = c.sample_spec();
    s.count = std::max(s.count, ini.index + 1);
    return sample_field(s, ini.index, c.domain) * ini.amplitude;
  }
  if (ini.kind == "file") {
    SpectralField f = load_field(ini.path);
    if (f.domain() != c.domain) throw ParameterError("initial field file is on a different domain than the config");
    if (f.parity() != Parity::SS) throw ParameterError("initial field must be SS");
    return f * ini.amplitude;
  }
  throw ParameterError("unknown initial kind '" + ini.kind + "'");
}

}  // namespace sqgspec
