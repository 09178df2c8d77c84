#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpcons/solver.hpp"
#include "fpcons/tensor.hpp"

namespace fpcons::app {

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, unsigned long line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  unsigned long line;
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

enum class Mode { admissibility, hyperbolicity, simulate, all };

std::string to_string(Mode m);

struct RunConfig {
  // [run]
  Mode mode = Mode::all;
  std::uint64_t seed = 20240611;
  std::string output = "fpcons-out";
  // [model]
  std::string model = "classical";  // classical | tensor
  double rho = 1.0;
  Ten2 V = Ten2::identity();
  std::string sigma = "linear_isotropic";
  double lambda = 2.0;
  double mu = 1.0;
  std::string corruption = "none";  // none | normality | ellipticity | thermo | maxwell | galilean | parity
  // [admissibility]
  std::size_t probes = 100;
  // [hyperbolicity]
  int directions = 256;
  Ten2 eval_F = Ten2::identity();
  // [simulation]
  int dims = 1;
  int cells = 400;
  double length = 1.0;
  double cfl = 0.5;
  double t_end = 0.5;
  std::size_t monitor_every = 10;
  std::string initial = "sine";     // sine | affine | rest
  std::string wave = "longitudinal";  // longitudinal | transverse
  double amplitude = 1e-3;
  int wave_mode = 1;
  AffineData affine;

  /// FNV-1a of the configuration text the config was parsed from.
  std::uint64_t text_hash = 0;
};

/// Sectioned `key = value` text. Every key may also appear before the first
/// section. Throws ParseError (malformed text, with line number) or
/// ValidationError (every unknown key and invalid value at once).
RunConfig parse_config(const std::string& text);

/// Re-runs the value checks after command-line overrides. Throws ValidationError.
void validate(const RunConfig& cfg);

std::uint64_t fnv1a(const std::string& text);

}  // namespace fpcons::app
