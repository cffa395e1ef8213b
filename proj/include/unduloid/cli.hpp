#pragma once

#include <string>
#include <vector>

namespace unduloid {

// Front-end configuration shared by the subcommands; populated from flags.
struct RunConfig {
  int n = 8;
  double d = 1.0;
  double t_min = 5e-3;   // scan range
  double t_max = 0.999;
  int steps = 200;       // scan subdivisions; tables carry steps + 1 rows
  int grid_n = 2048;     // profile / spectral resolution
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_level = 12;
  double t_floor = 1e-3;
  std::string method = "tanh-sinh";   // quadrature rule: tanh-sinh | gauss
  std::string output_format = "csv";  // csv | json
  std::string output_path;            // empty writes to stdout
};

void validate(const RunConfig& rc);

// Parses the argument vector (program name excluded), runs the selected
// subcommand, and returns the process exit status: 0 success, 2 usage or
// validation error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace unduloid
