// SPDX-License-Identifier: Apache-2.0
#include "sqgspec/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqgspec/besov.hpp"
#include "sqgspec/config.hpp"
#include "sqgspec/error.hpp"
#include "sqgspec/field_io.hpp"
#include "sqgspec/harness.hpp"
#include "sqgspec/simd.hpp"
#include "sqgspec/sqg.hpp"

#ifndef SQGSPEC_VERSION
#define SQGSPEC_VERSION "0.0.0"
#endif

namespace sqgspec {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string version_string() { return SQGSPEC_VERSION; }

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate",       "verify-bilinear",   "verify-structure",
                                                 "verify-multipliers", "verify-duhamel", "verify-uniqueness",
                                                 "besov-norm"};
  return names;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe(const std::string& name) {
  if (name == "simulate") return "integrate SQG from the configured initial datum";
  if (name == "verify-bilinear") return "bilinear Besov bound over the tuple battery";
  if (name == "verify-structure") return "product decomposition and derivative-structure identity";
  if (name == "verify-multipliers") return "multiplier, Bernstein, elliptic and heat bounds";
  if (name == "verify-duhamel") return "Duhamel growth ratios and the initial smallness curve";
  if (name == "verify-uniqueness") return "distance between twin solver runs";
  if (name == "besov-norm") return "Besov norm of a field snapshot";
  return "";
}

std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ordered_json jnum(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool within_factor2(double a, double b) {
  if (a == 0.0 && b == 0.0) return true;
  if (!(a > 0.0 && b > 0.0)) return false;
  const double r = a / b;
  return r > 0.5 && r < 2.0;
}

/// Output directory bookkeeping: every report goes through write(), which
/// records it for the manifest.
class Run {
 public:
  Run(std::string subcommand, const ExperimentConfig& cfg) : sub_(std::move(subcommand)), cfg_(cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
      throw PathError("cannot create output directory '" + cfg.output_dir.string() + "'");
    }
    log_.open(cfg.output_dir / "run.log", std::ios::trunc);
    if (!log_) throw PathError("output directory '" + cfg.output_dir.string() + "' is not writable");
    log("start " + sub_ + " version " + version_string() + " simd " + std::string(simd::isa_name(simd::kernels().isa)));
    write("config.resolved.json", to_json(cfg).dump(2) + "\n");
  }

  const fs::path& dir() const { return cfg_.output_dir; }

  void log(const std::string& msg) {
    log_ << timestamp() << ' ' << msg << '\n';
    log_.flush();
  }

  void write(const std::string& name, const std::string& contents) {
    const fs::path p = dir() / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw PathError("cannot write '" + p.string() + "'");
    os << contents;
    track(name);
    log("wrote " + name);
  }

  void track(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  }

  /// Records every regular file under `sub` (relative to the output directory).
  void track_tree(const std::string& sub) {
    std::vector<std::string> names;
    for (const auto& e : fs::recursive_directory_iterator(dir() / sub)) {
      if (e.is_regular_file()) names.push_back(fs::relative(e.path(), dir()).generic_string());
    }
    std::sort(names.begin(), names.end());
    for (const auto& n : names) track(n);
  }

  int finish(bool passed, const std::string& summary, std::ostream& out) {
    log("summary " + summary);
    log(std::string("finish ") + (passed ? "pass" : "fail"));
    log_.close();
    ordered_json m;
    m["tool"] = "sqgspec";
    m["version"] = version_string();
    m["subcommand"] = sub_;
    m["config_hash"] = config_hash(cfg_);
    m["seed"] = cfg_.seed;
    m["status"] = passed ? "pass" : "fail";
    ordered_json files = ordered_json::array();
    for (const auto& f : files_) {
      std::ifstream is(dir() / f, std::ios::binary);
      std::stringstream ss;
      ss << is.rdbuf();
      const std::string bytes = ss.str();
      files.push_back({{"path", f}, {"bytes", bytes.size()}, {"fnv1a", fnv1a_hex(bytes)}});
    }
    m["files"] = files;
    m["log"] = "run.log";
    std::ofstream os(dir() / "manifest.json", std::ios::trunc);
    if (!os) throw PathError("cannot write manifest");
    os << m.dump(2) << '\n';
    out << sub_ << ": " << summary << (passed ? " [PASS]" : " [FAIL]") << '\n';
    return passed ? kExitOk : kExitAssertion;
  }

 private:
  std::string sub_;
  const ExperimentConfig& cfg_;
  std::ofstream log_;
  std::vector<std::string> files_;
};

std::string csv(const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += r[i];
    }
    s += '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& c, std::ostream& out) {
  Run run("simulate", c);
  const SpectralField theta0 = initial_field(c);
  run.log("integrating " + std::string(to_string(c.solver.scheme)) + " dt=" + g17(c.solver.dt) + " T=" + g17(c.solver.T));
  TrajectoryRecord traj;
  try {
    traj = simulate(theta0, c.solver);
  } catch (const BlowUpError& e) {
    ordered_json s{{"blow_up", true}, {"time", e.time()}, {"last_l2", e.last_l2()}, {"message", e.what()}};
    run.write("summary.json", s.dump(2) + "\n");
    return run.finish(false, "blow-up at t=" + g6(e.time()) + " (last L2 " + g6(e.last_l2()) + ")", out);
  }
  save_trajectory(run.dir() / "trajectory", traj);
  run.track_tree("trajectory");

  double max_orth = 0.0;
  for (const auto& d : traj.diagnostics) max_orth = std::max(max_orth, d.orthogonality_residual);
  ordered_json s;
  s["blow_up"] = false;
  s["final_time"] = traj.times.back();
  s["steps"] = static_cast<long long>(std::ceil(c.solver.T / c.solver.dt - 1e-9));
  s["snapshots"] = traj.snapshots.size();
  s["final_l2"] = l2_norm(traj.final_state());
  s["max_orthogonality_residual"] = max_orth;
  std::string summary = "T=" + g6(traj.times.back()) + " snapshots=" + std::to_string(traj.snapshots.size()) +
                        " final_l2=" + g6(l2_norm(traj.final_state()));
  if (c.initial.kind == "eigenfunction") {
    const SpectralField exact = heat_semigroup(theta0, traj.times.back());
    double err = 0.0;
    for (std::size_t i = 0; i < exact.coefficients().size(); ++i) {
      err = std::max(err, std::fabs(exact.coefficients()[i] - traj.final_state().coefficients()[i]));
    }
    s["analytic_error"] = err;
    summary += " analytic_error=" + g6(err);
  }
  run.write("summary.json", s.dump(2) + "\n");
  return run.finish(true, summary, out);
}

std::vector<BilinearTuple> probe_tuples(const std::vector<BilinearTuple>& base) {
  std::vector<BilinearTuple> out;
  for (double s : {-0.9, 1.9}) {
    for (const auto& t : base) {
      if (t.s != base.front().s) continue;
      BilinearTuple p = t;
      p.s = s;
      out.push_back(p);
    }
  }
  return out;
}

std::string battery_csv(const std::vector<EstimateReport>& reports) {
  std::vector<std::vector<std::string>> rows{
      {"s", "p", "p1", "p2", "p3", "p4", "q", "samples", "rejected", "max", "mean", "refined_max", "refinement_stable"}};
  for (const auto& r : reports) {
    const auto& t = r.params;
    rows.push_back({g17(t.s), g17(t.p), g17(t.p1), g17(t.p2), g17(t.p3), g17(t.p4), g17(t.q),
                    std::to_string(r.ratios.size() + r.rejected), std::to_string(r.rejected), g17(r.max), g17(r.mean),
                    r.refined_max ? g17(*r.refined_max) : "", r.refinement_stable ? (*r.refinement_stable ? "1" : "0") : ""});
  }
  return csv(rows);
}

int cmd_verify_bilinear(const ExperimentConfig& c, std::ostream& out) {
  Run run("verify-bilinear", c);
  const SampleSpec spec = c.sample_spec();
  const DyadicProfile profile = c.profile();
  std::optional<DomainSpec> refined;
  if (c.battery.refine_factor > 1) {
    refined = c.domain.with_grid(c.domain.N1 * c.battery.refine_factor, c.domain.N2 * c.battery.refine_factor);
  }
  run.log("battery of " + std::to_string(c.battery.tuples.size()) + " tuples over " + std::to_string(spec.count) +
          " sample pairs");
  const auto reports = bilinear_battery(c.domain, spec, c.battery.tuples, profile, refined, c.workers);
  std::ostringstream js;
  write_reports_json(js, reports);
  run.write("bilinear.json", js.str());
  run.write("bilinear_summary.csv", battery_csv(reports));

  if (c.battery.probes && !c.battery.tuples.empty()) {
    const auto probes = bilinear_battery(c.domain, spec, probe_tuples(c.battery.tuples), profile, refined, c.workers);
    std::ostringstream ps;
    write_reports_json(ps, probes);
    run.write("bilinear_probes.json", ps.str());
    run.write("bilinear_probes_summary.csv", battery_csv(probes));
  }

  bool ok = true;
  double worst = 0.0;
  std::size_t stable = 0;
  for (const auto& r : reports) {
    ok = ok && r.rejected == 0;
    for (double x : r.ratios) ok = ok && std::isfinite(x) && x >= 0.0;
    worst = std::max(worst, r.max);
    if (!r.refinement_stable || *r.refinement_stable) ++stable;
  }
  ok = ok && stable == reports.size();
  return run.finish(ok,
                    std::to_string(reports.size()) + " tuples x " + std::to_string(spec.count) +
                        " samples; max ratio " + g6(worst) + "; refinement-stable " + std::to_string(stable) + "/" +
                        std::to_string(reports.size()),
                    out);
}

int cmd_verify_structure(const ExperimentConfig& c, std::ostream& out) {
  Run run("verify-structure", c);
  SampleSpec spec = c.sample_spec();
  spec.count = std::max(spec.count, 2 * c.structure.pairs);
  const DyadicProfile profile = c.profile();
  const JRange range = resolved_j_range(c.domain);

  std::vector<std::vector<std::string>> prows{{"pair", "residual", "nonzero_terms"}};
  std::vector<std::vector<std::string>> srows{{"pair", "k", "l", "nodes_per_decade", "residual", "truncation_bound"}};
  double worst_product = 0.0, worst_structure = 0.0;
  bool converges = true;
  int pairs_checked = 0;

  std::vector<int> levels = c.structure.nodes_per_decade;
  std::sort(levels.begin(), levels.end());
  for (int i = 0; i < c.structure.pairs; ++i) {
    const SpectralField f = sample_field(spec, 2 * i, c.domain), g = sample_field(spec, 2 * i + 1, c.domain);
    const auto pd = verify_product_decomposition(f, g, profile, c.solver.dealias_factor);
    worst_product = std::max(worst_product, pd.residual);
    prows.push_back({std::to_string(i), g17(pd.residual), std::to_string(pd.nonzero_terms)});

    for (int k = range.min; k <= range.max; ++k) {
      const SpectralField fk = dyadic_block(f, k, profile);
      if (fk.is_zero()) continue;
      for (int l = range.min; l <= range.max; ++l) {
        const SpectralField gl = dyadic_block(g, l, profile);
        if (gl.is_zero()) continue;
        ++pairs_checked;
        double prev = -1.0;
        for (int n : levels) {
          QuadratureSpec q = c.quadrature;
          q.nodes_per_decade = n;
          const auto r = verify_derivative_structure(fk, gl, q, StructureSign::Corrected, c.solver.dealias_factor);
          srows.push_back({std::to_string(i), std::to_string(k), std::to_string(l), std::to_string(n),
                           g17(r.residual), g17(r.truncation_bound)});
          if (prev >= 0.0 && !(r.residual <= std::max(0.5 * prev, 1e-9))) converges = false;
          prev = r.residual;
        }
        const auto r = verify_derivative_structure(fk, gl, c.quadrature, StructureSign::Corrected, c.solver.dealias_factor);
        worst_structure = std::max(worst_structure, r.residual);
      }
    }
  }
  run.write("product_decomposition.csv", csv(prows));
  run.write("structure.csv", csv(srows));
  const bool ok = worst_product <= 1e-10 && worst_structure <= 1e-6 && converges;
  ordered_json s{{"product_residual_max", worst_product},
                 {"structure_residual_max", worst_structure},
                 {"structure_nodes_per_decade", c.quadrature.nodes_per_decade},
                 {"block_pairs", pairs_checked},
                 {"quadrature_convergent", converges}};
  run.write("structure_summary.json", s.dump(2) + "\n");
  return run.finish(ok,
                    "product residual " + g6(worst_product) + "; structure residual " + g6(worst_structure) + " over " +
                        std::to_string(pairs_checked) + " block pairs; convergent " + (converges ? "yes" : "no"),
                    out);
}

int cmd_verify_multipliers(const ExperimentConfig& c, std::ostream& out) {
  Run run("verify-multipliers", c);
  const SampleSpec spec = c.sample_spec();
  const DyadicProfile profile = c.profile();
  const int rf = c.multipliers.refine_factor;
  const DomainSpec fine = c.domain.with_grid(c.domain.N1 * rf, c.domain.N2 * rf);

  const auto mb = multiplier_bounds(c.domain, spec, c.multipliers.p, profile, c.multipliers.elliptic_p, c.workers);
  const auto hs = heat_smoothing(c.domain, spec, profile, c.workers);
  std::optional<MultiplierBounds> mbf;
  std::optional<HeatSmoothing> hsf;
  if (rf > 1) {
    mbf = multiplier_bounds(fine, spec, c.multipliers.p, profile, c.multipliers.elliptic_p, c.workers);
    hsf = heat_smoothing(fine, spec, profile, c.workers);
  }

  bool ok = mb.gradient_identity_error <= 1e-10;
  std::vector<std::vector<std::string>> rows{{"p", "j", "multiplier_max", "bernstein1_max", "bernstein2_max",
                                              "refined_multiplier_max", "refined_bernstein1_max",
                                              "refined_bernstein2_max", "finite", "stable"}};
  for (const auto& r : mb.rows) {
    const MultiplierRow* f = mbf ? mbf->find(r.p, r.j) : nullptr;
    const bool stable = !f || (within_factor2(r.multiplier_max, f->multiplier_max) &&
                               within_factor2(r.bernstein1_max, f->bernstein1_max));
    const bool finite = r.finite && (!f || f->finite);
    ok = ok && stable && finite;
    rows.push_back({g17(r.p), std::to_string(r.j), g17(r.multiplier_max), g17(r.bernstein1_max),
                    g17(r.bernstein2_max), f ? g17(f->multiplier_max) : "", f ? g17(f->bernstein1_max) : "",
                    f ? g17(f->bernstein2_max) : "", finite ? "1" : "0", stable ? "1" : "0"});
  }
  run.write("multipliers.csv", csv(rows));

  std::vector<std::vector<std::string>> hrows{{"j", "fitted_rate", "bound"}};
  for (const auto& [j, rate] : hs.decay_rates) {
    const double bound = -0.25 * std::ldexp(1.0, 2 * j);
    ok = ok && rate <= bound;
    hrows.push_back({std::to_string(j), g17(rate), g17(bound)});
  }
  run.write("heat.csv", csv(hrows));
  if (hsf) ok = ok && within_factor2(hs.gradient_smoothing_max, hsf->gradient_smoothing_max);

  ordered_json s;
  s["smoothing_2_inf_max"] = mb.smoothing_2_inf_max;
  s["gradient_identity_error"] = mb.gradient_identity_error;
  ordered_json ell = ordered_json::array();
  for (const auto& [p, v] : mb.elliptic_max) ell.push_back({{"p", p}, {"max_ratio", v}});
  s["elliptic"] = ell;
  s["gradient_smoothing_max"] = hs.gradient_smoothing_max;
  if (mbf) {
    s["refined_smoothing_2_inf_max"] = mbf->smoothing_2_inf_max;
    s["refined_gradient_smoothing_max"] = hsf->gradient_smoothing_max;
  }
  run.write("multipliers_summary.json", s.dump(2) + "\n");
  return run.finish(ok,
                    std::to_string(mb.rows.size()) + " (p, j) rows; gradient identity error " +
                        g6(mb.gradient_identity_error) + "; heat rates for " + std::to_string(hs.decay_rates.size()) +
                        " blocks; gradient smoothing " + g6(hs.gradient_smoothing_max),
                    out);
}

int cmd_verify_duhamel(const ExperimentConfig& c, std::ostream& out) {
  Run run("verify-duhamel", c);
  const DyadicProfile profile = c.profile();
  SolverConfig a = c.solver, b = c.solver;
  b.dt = a.dt / 2.0;
  b.snapshot_stride = 2 * a.snapshot_stride;
  std::vector<std::vector<std::string>> rows{{"case", "ratio_dt", "ratio_dt_half"}};
  bool ok = true;
  double worst_change = 1.0;
  for (int i = 0; i < c.duhamel.cases; ++i) {
    const SpectralField theta0 = two_mode_field(c.domain, c.seed, i, c.initial.amplitude);
    std::optional<double> ra, rb;
    try {
      ra = verify_duhamel_growth(simulate(theta0, a), c.duhamel.p, profile, c.duhamel.s);
      rb = verify_duhamel_growth(simulate(theta0, b), c.duhamel.p, profile, c.duhamel.s);
    } catch (const BlowUpError& e) {
      run.log("case " + std::to_string(i) + " blew up at t=" + g17(e.time()));
      ok = false;
    }
    const bool good = ra && rb && std::isfinite(*ra) && std::isfinite(*rb) && within_factor2(*ra, *rb);
    ok = ok && good;
    if (ra && rb && *ra > 0.0 && *rb > 0.0) worst_change = std::max(worst_change, std::max(*ra / *rb, *rb / *ra));
    rows.push_back({std::to_string(i), ra ? g17(*ra) : "", rb ? g17(*rb) : ""});
  }
  run.write("duhamel.csv", csv(rows));

  std::vector<double> times = c.duhamel.smallness_times;
  if (times.empty()) {
    for (int k = 0; k <= 40; ++k) times.push_back(std::pow(10.0, -1.0 - 5.0 * k / 40.0));
  }
  const auto curve = verify_initial_smallness(initial_field(c), c.duhamel.smallness_p, times);
  std::ostringstream cs;
  write_curve_csv(cs, "t", "value", curve);
  run.write("smallness.csv", cs.str());

  return run.finish(ok,
                    std::to_string(c.duhamel.cases) + " two-mode cases at p=" + g6(c.duhamel.p) +
                        "; worst dt-halving change factor " + g6(worst_change) + "; smallness curve " +
                        std::to_string(curve.size()) + " points",
                    out);
}

int cmd_verify_uniqueness(const ExperimentConfig& c, std::ostream& out) {
  Run run("verify-uniqueness", c);
  const SpectralField theta0 = initial_field(c);
  const SolverConfig b = c.solver_b();
  run.log("run A dt=" + g17(c.solver.dt) + " " + std::string(to_string(c.solver.scheme)) + "; run B dt=" + g17(b.dt) +
          " " + std::string(to_string(b.scheme)));
  const auto curve = uniqueness_experiment(theta0, c.solver, b);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < curve.times.size(); ++i) pts.emplace_back(curve.times[i], curve.distances[i]);
  std::ostringstream cs;
  write_curve_csv(cs, "t", "distance", pts);
  run.write("uniqueness.csv", cs.str());
  ordered_json s{{"max_distance", curve.max_distance},
                 {"relative_max_distance", curve.max_distance / l2_norm(theta0)},
                 {"diverged", curve.diverged},
                 {"points", curve.times.size()}};
  run.write("uniqueness_summary.json", s.dump(2) + "\n");
  return run.finish(true,
                    std::string(curve.diverged ? "diverged; " : "") + "max distance " + g6(curve.max_distance) +
                        " over " + std::to_string(curve.times.size()) + " common times",
                    out);
}

int cmd_besov_norm(const ExperimentConfig& c, const CliOptions& opts, std::ostream& out) {
  if (!opts.field) throw ConfigError("--field", "besov-norm needs an input field file");
  const BesovParams params{opts.s, opts.p, opts.q};
  const auto v = params.violations();
  if (!v.empty()) throw ConfigError("--s/--p/--q", v.front());
  const SpectralField f = load_field(*opts.field);
  if (f.parity() != Parity::SS) throw ParameterError("besov-norm needs an SS field");
  Run run("besov-norm", c);
  const BesovResult r = besov_norm(f, params, c.profile());
  std::ostringstream cs;
  write_besov_csv(cs, r);
  run.write("besov.csv", cs.str());
  ordered_json s{{"field", opts.field->generic_string()}, {"s", params.s}, {"p", jnum(params.p)},
                 {"q", jnum(params.q)}, {"norm", r.norm}};
  run.write("besov.json", s.dump(2) + "\n");
  return run.finish(true, "norm " + g17(r.norm), out);
}

}  // namespace

int run(const std::string& subcommand, const CliOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
      err << "error: unknown subcommand '" << subcommand << "'\n";
      return kExitInvalid;
    }
    ExperimentConfig cfg = load_config(opts.config, opts.overrides);
    if (opts.out) cfg.output_dir = *opts.out;
    if (opts.seed) cfg.seed = *opts.seed;
    const auto violations = validate_config(cfg);
    if (!violations.empty()) {
      for (const auto& v : violations) err << "invalid config: " << v << '\n';
      return kExitInvalid;
    }
    if (subcommand == "simulate") return cmd_simulate(cfg, out);
    if (subcommand == "verify-bilinear") return cmd_verify_bilinear(cfg, out);
    if (subcommand == "verify-structure") return cmd_verify_structure(cfg, out);
    if (subcommand == "verify-multipliers") return cmd_verify_multipliers(cfg, out);
    if (subcommand == "verify-duhamel") return cmd_verify_duhamel(cfg, out);
    if (subcommand == "verify-uniqueness") return cmd_verify_uniqueness(cfg, out);
    return cmd_besov_norm(cfg, opts, out);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
  } catch (const PathError& e) {
    err << "path error: " << e.what() << '\n';
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInvalid;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Spectral experiments for dissipative SQG on a rectangle"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  CliOptions opts;
  std::string config, out_dir, field;
  std::uint64_t seed = 0;
  std::string p_text = "2", q_text = "2";

  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", config, "experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--set", opts.overrides, "override a config key: key.path=value")->take_all();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    if (name == "besov-norm") {
      sub->add_option("--field", field, "field snapshot file")->required();
      sub->add_option("--s", opts.s, "regularity index");
      sub->add_option("--p", p_text, "Lebesgue exponent (number or inf)");
      sub->add_option("--q", q_text, "summability index (number or inf)");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  CLI::App* chosen = app.get_subcommands().front();
  if (!config.empty()) opts.config = config;
  if (!out_dir.empty()) opts.out = out_dir;
  if (chosen->count("--seed")) opts.seed = seed;
  if (!field.empty()) opts.field = field;
  auto exponent = [](const std::string& text, const char* flag, double& outv) {
    if (text == "inf" || text == "infinity") {
      outv = kInf;
      return true;
    }
    try {
      std::size_t pos = 0;
      outv = std::stod(text, &pos);
      if (pos == text.size()) return true;
    } catch (const std::exception&) {
    }
    std::cerr << "invalid config: " << flag << ": expected a number or inf\n";
    return false;
  };
  if (!exponent(p_text, "--p", opts.p) || !exponent(q_text, "--q", opts.q)) return kExitInvalid;
  return run(chosen->get_name(), opts, std::cout, std::cerr);
}

}  // namespace sqgspec
