#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "config.hpp"

namespace fpcons::app {

// Process exit codes.
enum ExitCode : int {
  exit_ok = 0,
  exit_admissibility = 2,
  exit_hyperbolicity = 3,
  exit_simulation = 4,
  exit_config = 64,
  exit_io = 74,
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs the configured stages, writing reports under cfg.output. In mode `all`
/// every stage runs; the result is the code of the first failing one. Messages go
/// to `log` (pass a null stream for quiet operation). Throws IoError.
int run_all(const RunConfig& cfg, std::ostream& log);

/// "# fpcons <version> config_hash=<hex> seed=<seed>"
std::string output_header(const RunConfig& cfg);

}  // namespace fpcons::app
