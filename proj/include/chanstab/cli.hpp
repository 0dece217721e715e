#ifndef CHANSTAB_CLI_HPP_
#define CHANSTAB_CLI_HPP_

#include <string>
#include <vector>

#include "chanstab/types.hpp"

namespace chanstab {

// Command-line / config-file driver state. Each scalar axis may carry a
// sweep list; commands act on the cartesian product in input order.
struct RunConfig {
  std::string command;
  std::vector<Real> eps{1e-5};
  std::vector<Real> mach{0.3};
  std::vector<Real> lambda{0.0};
  std::vector<Real> t0{10.0};
  int grid_n = 0;  // 0: resolution default chosen from eps
  Real tol = 1e-6;
  std::string out_path;
  std::string format = "csv";
  bool have_window_center = false;
  Complex window_center{0.0, 0.0};
  Real window_radius = 0.0;
  std::string config_path;
};

// "1,2,3" or "start:stop:count" (log-spaced); throws ConfigError.
std::vector<Real> parse_sweep_list(const std::string& text);

// key = value lines with an optional [sweep] section whose keys carry lists.
void load_config_file(const std::string& path, RunConfig* cfg);

int default_grid_n(Real eps);

RunConfig parse_cli(int argc, const char* const* argv);

// Dispatches a parsed configuration; returns the process exit code
// (0 ok, 1 configuration/validation error, 2 numerical failure).
int run_config(const RunConfig& cfg);
int run_cli(int argc, const char* const* argv);

}  // namespace chanstab

#endif  // CHANSTAB_CLI_HPP_
