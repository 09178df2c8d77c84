#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "fpcons/version.hpp"
#include "runner.hpp"

using namespace fpcons::app;

int main(int argc, char** argv) {
  CLI::App cli{"Admissibility, hyperbolicity and wave-propagation runs for (F, p) elasticity models"};
  std::string config_path, mode, out;
  std::uint64_t seed = 0;
  bool quiet = false;
  cli.add_option("--config", config_path, "configuration file")->required();
  cli.add_option("--mode", mode, "override mode")->check(CLI::IsMember({"admissibility", "hyperbolicity", "simulate", "all"}));
  cli.add_option("--out", out, "override output directory");
  auto* seed_opt = cli.add_option("--seed", seed, "override probe seed");
  cli.add_flag("--quiet", quiet, "suppress progress messages");
  cli.set_version_flag("--version", std::string(fpcons::version));
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = cli.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config " << config_path << '\n';
    return exit_config;
  }
  std::ostringstream text;
  text << in.rdbuf();

  RunConfig cfg;
  try {
    cfg = parse_config(text.str());
    if (!mode.empty()) cfg = [&] {
        RunConfig c = cfg;
        c.mode = mode == "admissibility"   ? Mode::admissibility
                 : mode == "hyperbolicity" ? Mode::hyperbolicity
                 : mode == "simulate"      ? Mode::simulate
                                           : Mode::all;
        return c;
      }();
    if (!out.empty()) cfg.output = out;
    if (*seed_opt) cfg.seed = seed;
    validate(cfg);
  } catch (const ParseError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return exit_config;
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems) std::cerr << config_path << ": " << p << '\n';
    return exit_config;
  }

  std::ostringstream sink;
  std::ostream& log = quiet ? static_cast<std::ostream&>(sink) : std::cout;
  try {
    return run_all(cfg, log);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  }
}
