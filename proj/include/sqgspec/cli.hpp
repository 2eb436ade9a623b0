// SPDX-License-Identifier: Apache-2.0
#pragma once

// Command-line front end:
//   sqgspec <subcommand> [--config <path>] [--set k=v]... [--out <dir>] [--seed <int>]
// Subcommands: simulate, verify-bilinear, verify-structure, verify-multipliers,
// verify-duhamel, verify-uniqueness, besov-norm.
//
// Every run writes its reports into the output directory, then a run.log
// (the only file with timestamps) and finally manifest.json.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sqgspec {

enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitInvalid = 2 };

struct CliOptions {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  // besov-norm
  std::optional<std::filesystem::path> field;
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand; the summary line goes to `out`, diagnostics to `err`.
int run(const std::string& subcommand, const CliOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to run().
int cli_main(int argc, char** argv);

std::string version_string();

}  // namespace sqgspec
