// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sqgspec/error.hpp"
#include "sqgspec/field_io.hpp"
#include "sqgspec/sqg.hpp"

namespace sqgspec {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string snapshot_name(std::size_t i) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.field", i);
  return buf;
}

double parse_double(const std::string& s, const fs::path& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad number '" + s + "' in " + where.string());
  }
}

}  // namespace

void save_trajectory(const fs::path& dir, const TrajectoryRecord& traj) {
  std::error_code ec;
  fs::create_directories(dir / "snapshots", ec);
  if (ec) throw PathError("cannot create trajectory directory '" + dir.string() + "': " + ec.message());

  nlohmann::ordered_json cfg;
  cfg["domain"] = {{"L1", traj.domain.L1}, {"L2", traj.domain.L2}, {"M1", traj.domain.M1},
                   {"M2", traj.domain.M2}, {"N1", traj.domain.N1}, {"N2", traj.domain.N2}};
  cfg["solver"] = {{"dt", traj.config.dt},
                   {"T", traj.config.T},
                   {"scheme", std::string(to_string(traj.config.scheme))},
                   {"dealias_factor", traj.config.dealias_factor},
                   {"snapshot_stride", traj.config.snapshot_stride}};
  cfg["snapshot_count"] = traj.snapshots.size();
  {
    std::ofstream os(dir / "config.json");
    if (!os) throw PathError("cannot write " + (dir / "config.json").string());
    os << cfg.dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "snapshots.csv");
    if (!os) throw PathError("cannot write " + (dir / "snapshots.csv").string());
    os << "index,time,file\n";
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      const std::string name = snapshot_name(i);
      os << i << ',' << fmt_double(traj.times[i]) << ",snapshots/" << name << '\n';
      save_field(dir / "snapshots" / name, traj.snapshots[i]);
    }
  }
  {
    std::ofstream os(dir / "diagnostics.csv");
    if (!os) throw PathError("cannot write " + (dir / "diagnostics.csv").string());
    os << "time,l2_norm,orthogonality_residual\n";
    for (const auto& d : traj.diagnostics) {
      os << fmt_double(d.time) << ',' << fmt_double(d.l2_norm) << ',' << fmt_double(d.orthogonality_residual)
         << '\n';
    }
  }
}

TrajectoryRecord load_trajectory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw PathError("trajectory directory '" + dir.string() + "' not found");
  std::ifstream cs(dir / "config.json");
  if (!cs) throw PathError("missing " + (dir / "config.json").string());
  TrajectoryRecord traj;
  try {
    const auto cfg = nlohmann::json::parse(cs);
    const auto& d = cfg.at("domain");
    traj.domain = {d.at("L1").get<double>(), d.at("L2").get<double>(), d.at("M1").get<int>(),
                   d.at("M2").get<int>(), d.at("N1").get<int>(), d.at("N2").get<int>()};
    const auto& s = cfg.at("solver");
    traj.config.dt = s.at("dt").get<double>();
    traj.config.T = s.at("T").get<double>();
    traj.config.scheme = parse_scheme(s.at("scheme").get<std::string>());
    traj.config.dealias_factor = s.at("dealias_factor").get<int>();
    traj.config.snapshot_stride = s.at("snapshot_stride").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad trajectory config: " + std::string(e.what()));
  }

  std::ifstream ss(dir / "snapshots.csv");
  if (!ss) throw PathError("missing " + (dir / "snapshots.csv").string());
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string idx, time, file;
    std::getline(row, idx, ',');
    std::getline(row, time, ',');
    std::getline(row, file, ',');
    traj.times.push_back(parse_double(time, dir / "snapshots.csv"));
    SpectralField f = load_field(dir / file);
    if (f.domain() != traj.domain) throw FormatError("snapshot " + file + " is on a different domain");
    traj.snapshots.push_back(std::move(f));
  }
  if (traj.snapshots.empty()) throw FormatError("trajectory has no snapshots");

  std::ifstream ds(dir / "diagnostics.csv");
  if (ds) {
    std::getline(ds, line);
    while (std::getline(ds, line)) {
      if (line.empty()) continue;
      std::stringstream row(line);
      std::string a, b, c;
      std::getline(row, a, ',');
      std::getline(row, b, ',');
      std::getline(row, c, ',');
      traj.diagnostics.push_back({parse_double(a, dir / "diagnostics.csv"), parse_double(b, dir / "diagnostics.csv"),
                                  parse_double(c, dir / "diagnostics.csv")});
    }
  }
  return traj;
}

}  // namespace sqgspec
