#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "fpcons/admissibility.hpp"
#include "fpcons/constitutive.hpp"

namespace fpcons::app {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

std::vector<double> numbers(const std::string& value) {
  std::string cleaned = value;
  for (char& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream is(cleaned);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double d = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    out.push_back(d);
  }
  return out;
}

double real(const std::string& v) {
  auto n = numbers(v);
  if (n.size() != 1) throw std::invalid_argument(v);
  return n[0];
}

long long integer(const std::string& v) {
  std::size_t used = 0;
  long long n = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return n;
}

Vec3 vec3(const std::string& v) {
  auto n = numbers(v);
  if (n.size() != 3) throw std::invalid_argument("expected 3 numbers");
  return {{n[0], n[1], n[2]}};
}

// 9 numbers (row-major) or 3 (diagonal).
Ten2 ten2(const std::string& v) {
  auto n = numbers(v);
  if (n.size() == 3) return Ten2::diag(n[0], n[1], n[2]);
  if (n.size() != 9) throw std::invalid_argument("expected 3 (diagonal) or 9 (row-major) numbers");
  Ten2 t;
  for (int k = 0; k < 9; ++k) t.c[k] = n[k];
  return t;
}

Mode mode_from(const std::string& v) {
  if (v == "admissibility") return Mode::admissibility;
  if (v == "hyperbolicity") return Mode::hyperbolicity;
  if (v == "simulate") return Mode::simulate;
  if (v == "all") return Mode::all;
  throw std::invalid_argument("expected admissibility|hyperbolicity|simulate|all");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct Key {
  const char* section;
  Setter set;
};

const std::map<std::string, Key>& schema() {
  static const std::map<std::string, Key> keys{
      {"mode", {"run", [](RunConfig& c, const std::string& v) { c.mode = mode_from(v); }}},
      {"seed", {"run", [](RunConfig& c, const std::string& v) {
                  std::size_t used = 0;
                  c.seed = std::stoull(v, &used);
                  if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
                }}},
      {"output", {"run", [](RunConfig& c, const std::string& v) { c.output = v; }}},
      {"model", {"model", [](RunConfig& c, const std::string& v) { c.model = v; }}},
      {"rho", {"model", [](RunConfig& c, const std::string& v) { c.rho = real(v); }}},
      {"V", {"model", [](RunConfig& c, const std::string& v) { c.V = ten2(v); }}},
      {"sigma", {"model", [](RunConfig& c, const std::string& v) { c.sigma = v; }}},
      {"lambda", {"model", [](RunConfig& c, const std::string& v) { c.lambda = real(v); }}},
      {"mu", {"model", [](RunConfig& c, const std::string& v) { c.mu = real(v); }}},
      {"corruption", {"model", [](RunConfig& c, const std::string& v) { c.corruption = v; }}},
      {"probes", {"admissibility", [](RunConfig& c, const std::string& v) {
                    long long n = integer(v);
                    if (n < 0) throw std::invalid_argument(v);
                    c.probes = static_cast<std::size_t>(n);
                  }}},
      {"directions", {"hyperbolicity", [](RunConfig& c, const std::string& v) { c.directions = int(integer(v)); }}},
      {"eval_F", {"hyperbolicity", [](RunConfig& c, const std::string& v) { c.eval_F = ten2(v); }}},
      {"dims", {"simulation", [](RunConfig& c, const std::string& v) { c.dims = int(integer(v)); }}},
      {"cells", {"simulation", [](RunConfig& c, const std::string& v) { c.cells = int(integer(v)); }}},
      {"length", {"simulation", [](RunConfig& c, const std::string& v) { c.length = real(v); }}},
      {"cfl", {"simulation", [](RunConfig& c, const std::string& v) { c.cfl = real(v); }}},
      {"t_end", {"simulation", [](RunConfig& c, const std::string& v) { c.t_end = real(v); }}},
      {"monitor_every", {"simulation", [](RunConfig& c, const std::string& v) {
                           long long n = integer(v);
                           if (n < 1) throw std::invalid_argument(v);
                           c.monitor_every = static_cast<std::size_t>(n);
                         }}},
      {"initial", {"simulation", [](RunConfig& c, const std::string& v) { c.initial = v; }}},
      {"wave", {"simulation", [](RunConfig& c, const std::string& v) { c.wave = v; }}},
      {"amplitude", {"simulation", [](RunConfig& c, const std::string& v) { c.amplitude = real(v); }}},
      {"wave_mode", {"simulation", [](RunConfig& c, const std::string& v) { c.wave_mode = int(integer(v)); }}},
      {"affine_A", {"simulation", [](RunConfig& c, const std::string& v) { c.affine.A = ten2(v); }}},
      {"affine_B", {"simulation", [](RunConfig& c, const std::string& v) { c.affine.B = ten2(v); }}},
      {"affine_a", {"simulation", [](RunConfig& c, const std::string& v) { c.affine.a = vec3(v); }}},
      {"affine_b", {"simulation", [](RunConfig& c, const std::string& v) { c.affine.b = vec3(v); }}},
      {"affine_c", {"simulation", [](RunConfig& c, const std::string& v) { c.affine.c = vec3(v); }}},
      {"affine_x0", {"simulation", [](RunConfig& c, const std::string& v) { c.affine.x0 = vec3(v); }}},
  };
  return keys;
}

void check_values(const RunConfig& c, std::vector<std::string>& problems) {
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  need(c.model == "classical" || c.model == "tensor", "model: expected classical|tensor, got '" + c.model + "'");
  need(c.rho > 0.0 && std::isfinite(c.rho), "rho: must be positive");
  auto names = stored_energy_names();
  need(std::find(names.begin(), names.end(), c.sigma) != names.end(), "sigma: unknown stored energy '" + c.sigma + "'");
  need(std::isfinite(c.lambda) && std::isfinite(c.mu), "lambda/mu: must be finite");
  if (c.model == "tensor") {
    need(asymmetry(c.V) <= Tolerances::sym * std::max(1.0, max_abs(c.V)), "V: must be symmetric");
    need(std::abs(det(c.V)) > 1e-12, "V: must be invertible");
  }
  need(c.corruption == "none" || violation_from_string(c.corruption).has_value(),
       "corruption: expected none|normality|ellipticity|thermo|maxwell|galilean|parity");
  need(c.corruption == "none" || c.model == "classical", "corruption: only available with model = classical");
  need(c.probes >= 1, "probes: must be at least 1");
  need(c.directions >= 1, "directions: must be at least 1");
  need(c.dims == 1 || c.dims == 3, "dims: must be 1 or 3");
  need(c.cells >= 4, "cells: must be at least 4");
  need(c.dims != 3 || c.cells <= 32, "cells: 3-D runs are limited to 32 cells per axis");
  need(c.length > 0.0 && std::isfinite(c.length), "length: must be positive");
  need(c.cfl > 0.0 && c.cfl <= 1.0, "cfl: must lie in (0, 1]");
  need(c.t_end > 0.0 && std::isfinite(c.t_end), "t_end: must be positive");
  need(c.initial == "sine" || c.initial == "affine" || c.initial == "rest", "initial: expected sine|affine|rest");
  need(c.wave == "longitudinal" || c.wave == "transverse", "wave: expected longitudinal|transverse");
  need(std::isfinite(c.amplitude), "amplitude: must be finite");
  need(c.wave_mode >= 1, "wave_mode: must be at least 1");
  need(std::abs(norm(c.affine.a) - 1.0) <= 1e-12, "affine_a: must be a unit vector");
  need(!c.output.empty(), "output: must not be empty");
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> p)
    : std::runtime_error("invalid configuration: " + join(p)), problems(std::move(p)) {}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::admissibility: return "admissibility";
    case Mode::hyperbolicity: return "hyperbolicity";
    case Mode::simulate: return "simulate";
    case Mode::all: return "all";
  }
  return "?";
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }

  RunConfig cfg;
  cfg.text_hash = fnv1a(text);
  std::vector<std::string> problems;
  std::map<std::string, std::string> seen;  // key -> where it was set
  auto apply = [&](const std::string& section, const std::string& key, const std::string& value) {
    const std::string where = section.empty() ? key : "[" + section + "] " + key;
    auto it = schema().find(key);
    if (it == schema().end()) {
      problems.push_back(where + ": unknown key");
      return;
    }
    if (!section.empty() && section != it->second.section) {
      problems.push_back(where + ": belongs in [" + std::string(it->second.section) + "]");
      return;
    }
    if (auto prev = seen.find(key); prev != seen.end()) {
      problems.push_back(where + ": already set as " + prev->second);
      return;
    }
    seen[key] = where;
    try {
      it->second.set(cfg, value);
    } catch (const std::exception&) {
      problems.push_back(where + ": invalid value '" + value + "'");
    }
  };

  const std::vector<std::string> sections{"run", "model", "admissibility", "hyperbolicity", "simulation"};
  for (const auto& [name, node] : tree) {
    const bool is_section = std::find(sections.begin(), sections.end(), name) != sections.end();
    if (node.empty() && !(is_section && node.data().empty())) {
      apply("", name, node.data());
      continue;
    }
    if (!is_section) {
      problems.push_back("[" + name + "]: unknown section");
      continue;
    }
    for (const auto& [key, leaf] : node) apply(name, key, leaf.data());
  }
  check_values(cfg, problems);
  if (!problems.empty()) throw ValidationError(problems);
  return cfg;
}

void validate(const RunConfig& cfg) {
  std::vector<std::string> problems;
  check_values(cfg, problems);
  if (!problems.empty()) throw ValidationError(problems);
}

}  // namespace fpcons::app
