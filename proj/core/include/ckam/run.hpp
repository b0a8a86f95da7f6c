#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace ckam {

enum ExitCode : int { kExitSuccess = 0, kExitError = 1, kExitNotConverged = 2 };

struct CliOptions {
  std::string subcommand;  ///< check | solve-hj | critical-value | mather | equilibrium | verify
  std::string config_path;
  std::optional<std::string> out_dir;
  bool emit_svg = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_n;
  std::optional<double> level;  ///< critical-value: u-level a (default a_m)
  std::string u_path;           ///< verify
  std::string m_path;           ///< verify
};

/// Runs one subcommand; diagnostics go to `err`, summaries to `out`.
int run_cli(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace ckam
