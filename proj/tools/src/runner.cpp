#include "runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fpcons/admissibility.hpp"
#include "fpcons/constitutive.hpp"
#include "fpcons/errors.hpp"
#include "fpcons/hyperbolicity.hpp"
#include "fpcons/solver.hpp"
#include "fpcons/version.hpp"

namespace fpcons::app {

namespace fs = std::filesystem;

namespace {

ConstitutiveModel build_model(const RunConfig& cfg) {
  StoredEnergy se = find_stored_energy(cfg.sigma, {cfg.lambda, cfg.mu});
  if (cfg.corruption != "none") return negative_control(*violation_from_string(cfg.corruption), se, cfg.rho);
  if (cfg.model == "tensor") return tensor_mass_model(cfg.V, se);
  return classical_model(cfg.rho, se);
}

class Output {
 public:
  Output(const RunConfig& cfg) : dir_(cfg.output), header_(output_header(cfg)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& body) const {
    const fs::path path = dir_ / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << header_ << '\n' << body;
    os.flush();
    if (!os) throw IoError("write failed: " + path.string());
  }

 private:
  fs::path dir_;
  std::string header_;
};

std::string vec_text(const Vec3& v) {
  std::ostringstream os;
  os.precision(10);
  os << '(' << v[0] << ", " << v[1] << ", " << v[2] << ')';
  return os.str();
}

int admissibility_stage(const RunConfig& cfg, const ConstitutiveModel& model, const Output& out, std::ostream& log) {
  ProbeOptions po;
  po.count = cfg.probes;
  po.seed = cfg.seed;
  AdmissibilityReport r = assess(model, po);
  std::ostringstream csv, kv;
  write_csv(csv, r);
  kv << "model = " << model.name << '\n';
  write_key_value(kv, r);
  out.write("admissibility.csv", csv.str());
  out.write("admissibility.txt", kv.str());
  for (const Check& c : r.checks())
    if (!c.ok) log << "admissibility: " << c.name << " failed (value " << c.value << ", tolerance " << c.tolerance
                   << ")\n";
  log << "admissibility: " << (r.all_ok() ? "pass" : "FAIL") << '\n';
  return r.all_ok() ? exit_ok : exit_admissibility;
}

int hyperbolicity_stage(const RunConfig& cfg, const ConstitutiveModel& model, const Output& out, std::ostream& log) {
  ScanOptions so;
  so.n_dirs = cfg.directions;
  // The block-matrix analysis assumes an isotropic mass density.
  so.block_analysis = cfg.model == "classical" && cfg.corruption == "none";
  auto S4_at = [&](const Ten2& F) { return elasticity_tensor(model, State{F, {}}); };
  HyperbolicityReport r = scan_directions(S4_at, cfg.eval_F, cfg.rho, so);
  std::ostringstream csv;
  csv.precision(10);
  csv << "# model=" << model.name << " strongly_elliptic=" << (r.strongly_elliptic ? "true" : "false")
      << " min_eigenvalue=" << r.min_eigenvalue << " worst_direction=" << r.worst_direction[0] << ' '
      << r.worst_direction[1] << ' ' << r.worst_direction[2] << '\n';
  write_csv(csv, r);
  out.write("hyperbolicity.csv", csv.str());
  if (!r.strongly_elliptic)
    log << "hyperbolicity: min acoustic eigenvalue " << r.min_eigenvalue << " along " << vec_text(r.worst_direction)
        << '\n';
  log << "hyperbolicity: " << (r.strongly_elliptic ? "pass" : "FAIL") << '\n';
  return r.strongly_elliptic ? exit_ok : exit_hyperbolicity;
}

Field initial_field(const RunConfig& cfg, const ConstitutiveModel& model) {
  Grid g = cfg.dims == 3 ? Grid::cube(cfg.cells, cfg.length) : Grid::line(cfg.cells, cfg.length);
  if (cfg.initial == "affine") return affine_initial_field(model, g, cfg.affine);
  if (cfg.initial == "sine") {
    SineWave w;
    w.amplitude = cfg.amplitude;
    w.mode = cfg.wave_mode;
    w.polarization = cfg.wave == "transverse" ? Vec3::basis(1) : Vec3::basis(0);
    return sine_wave_field(model, g, w);
  }
  return Field{g, std::vector<State>(g.size())};
}

int simulation_stage(const RunConfig& cfg, const ConstitutiveModel& model, const Output& out, std::ostream& log) {
  try {
    Field f0 = initial_field(cfg, model);
    std::ostringstream snap0;
    write_snapshot_csv(snap0, model, f0);
    out.write("snapshot_initial.csv", snap0.str());
    RunOptions opts;
    opts.cfl = cfg.cfl;
    opts.monitor_every = cfg.monitor_every;
    RunResult r = run(model, f0, cfg.t_end, opts);
    std::ostringstream mon, snap1;
    write_monitor_csv(mon, r.trace);
    write_snapshot_csv(snap1, model, r.field);
    out.write("monitors.csv", mon.str());
    out.write("snapshot_final.csv", snap1.str());
    const MonitorRecord& last = r.trace.records.back();
    log << "simulate: " << r.steps << " steps to t=" << r.field.t << ", energy drift " << last.drift
        << ", involution " << last.involution << '\n';
    return exit_ok;
  } catch (const NonHyperbolicState& e) {
    log << "simulate: refused to step: " << e.what() << '\n';
    return exit_hyperbolicity;
  } catch (const Blowup& e) {
    log << "simulate: " << e.what() << '\n';
    return exit_simulation;
  } catch (const DomainError& e) {
    log << "simulate: domain error: " << e.what() << '\n';
    return exit_simulation;
  } catch (const NewtonDivergence& e) {
    log << "simulate: initial data: " << e.what() << '\n';
    return exit_simulation;
  }
}

}  // namespace

std::string output_header(const RunConfig& cfg) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.text_hash));
  return "# fpcons " + std::string(version) + " config_hash=" + hash + " seed=" + std::to_string(cfg.seed) +
         " mode=" + to_string(cfg.mode);
}

int run_all(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  const ConstitutiveModel model = build_model(cfg);
  const Output out(cfg);
  int code = exit_ok;
  auto record = [&](int c) {
    if (code == exit_ok) code = c;
  };
  if (cfg.mode == Mode::admissibility || cfg.mode == Mode::all) record(admissibility_stage(cfg, model, out, log));
  if (cfg.mode == Mode::hyperbolicity || cfg.mode == Mode::all) record(hyperbolicity_stage(cfg, model, out, log));
  if (cfg.mode == Mode::simulate || cfg.mode == Mode::all) record(simulation_stage(cfg, model, out, log));
  return code;
}

}  // namespace fpcons::app
