#include "fpcons/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "fpcons/errors.hpp"

namespace fpcons {

ProbeRng::ProbeRng(std::uint64_t seed) : state_(seed) {}

double ProbeRng::uniform() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return double(z >> 11) * 0x1.0p-53;
}

Vec3 ProbeRng::unit_vector() {
  for (;;) {
    Vec3 v{{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)}};
    const double n = norm(v);
    if (n > 0.1 && n <= 1.0) return v / n;
  }
}

Vec3 ProbeRng::in_ball(double radius) {
  for (;;) {
    Vec3 v{{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)}};
    if (norm(v) <= 1.0) return radius * v;
  }
}

std::vector<State> make_probes(const ProbeOptions& opts) {
  ProbeRng rng(opts.seed);
  std::vector<State> out;
  out.reserve(opts.count);
  while (out.size() < opts.count) {
    Ten2 F = Ten2::identity();
    for (double& x : F.c) x += 0.5 * rng.uniform(-1.0, 1.0);
    const double J = det(F);
    if (J < opts.det_min || J > opts.det_max) continue;
    const Vec3 p = out.empty() ? Vec3{} : rng.in_ball(opts.momentum_radius);
    out.push_back({F, p});
  }
  return out;
}

Check Check::residual(std::string name, double value, double tol) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tol;
  c.sense = Sense::at_most;
  c.ok = std::isfinite(value) && value <= tol;
  return c;
}

Check Check::lower_bound(std::string name, double value, double tol) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tol;
  c.sense = Sense::above;
  c.ok = std::isfinite(value) && value > tol;
  return c;
}

std::vector<EllipticityProbe> make_ellipticity_probes(const ConstitutiveModel& model, const std::vector<State>& probes,
                                                      std::uint64_t seed) {
  ProbeRng rng(seed);
  std::vector<EllipticityProbe> out;
  out.reserve(probes.size());
  for (const State& s : probes) out.push_back({s.F, model.velocity(s), rng.unit_vector(), s.p});
  return out;
}

Ten2 stress_at_velocity(const ConstitutiveModel& model, const Ten2& F, const Vec3& v, const Vec3& p_seed) {
  const Vec3 p = momentum_from_velocity(model, F, v, p_seed);
  return model.stress({F, p});
}

Ten4 stress_F_jacobian_at_velocity(const ConstitutiveModel& model, const Ten2& F, const Vec3& v, const Vec3& p_seed) {
  const double h = step_F(F);
  Ten4 out;
  for (std::size_t hk = 0; hk < 9; ++hk) {
    Ten2 plus = F, minus = F;
    plus.c[hk] += h;
    minus.c[hk] -= h;
    const Ten2 d = (stress_at_velocity(model, plus, v, p_seed) - stress_at_velocity(model, minus, v, p_seed)) / (2.0 * h);
    for (std::size_t ij = 0; ij < 9; ++ij) out.c[9 * ij + hk] = d.c[ij];
  }
  if (!is_finite(out)) throw NonFinite("stress jacobian at fixed velocity: non-finite value");
  return out;
}

std::array<Ten2, 3> stress_velocity_jacobian(const ConstitutiveModel& model, const Ten2& F, const Vec3& v,
                                             const Vec3& p_seed) {
  const double h = step_p(v);
  std::array<Ten2, 3> out;
  for (std::size_t k = 0; k < 3; ++k) {
    Vec3 plus = v, minus = v;
    plus[k] += h;
    minus[k] -= h;
    out[k] = (stress_at_velocity(model, F, plus, p_seed) - stress_at_velocity(model, F, minus, p_seed)) / (2.0 * h);
    if (!is_finite(out[k])) throw NonFinite("stress velocity jacobian: non-finite value");
  }
  return out;
}

Ten2 ellipticity_matrix(const ConstitutiveModel& model, const Ten2& F, const Vec3& v, const Vec3& a,
                        const Vec3& p_seed) {
  const Ten4 d = stress_F_jacobian_at_velocity(model, F, v, p_seed);
  Ten2 E;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t h = 0; h < 3; ++h) {
      double acc = 0.0;
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) acc += d(i, j, h, k) * a[j] * a[k];
      E(i, h) = acc;
    }
  return E;
}

Check check_normality(const ConstitutiveModel& model, const std::vector<State>& probes,
                      const AdmissibilityTolerances& tol) {
  if (probes.empty()) throw PreconditionFailed("check_normality: no probes");
  double min_det = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t n = 0; n < probes.size(); ++n) {
    const double d = std::abs(det(fd::velocity_momentum_jacobian(model, probes[n])));
    if (d < min_det) {
      min_det = d;
      worst = n;
    }
  }
  Check c = Check::lower_bound("normality", min_det, tol.normality);
  c.detail = "worst_probe=" + std::to_string(worst);
  return c;
}

Check check_ellipticity(const ConstitutiveModel& model, const std::vector<EllipticityProbe>& probes,
                        const AdmissibilityTolerances& tol) {
  if (probes.empty()) throw PreconditionFailed("check_ellipticity: no probes");
  double min_det = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t n = 0; n < probes.size(); ++n) {
    const EllipticityProbe& pr = probes[n];
    if (std::abs(norm(pr.a) - 1.0) > 1e-12) throw NotUnit("check_ellipticity: direction a must be a unit vector");
    const double d = std::abs(det(ellipticity_matrix(model, pr.F, pr.v, pr.a, pr.p_seed)));
    if (d < min_det) {
      min_det = d;
      worst = n;
    }
  }
  Check c = Check::lower_bound("ellipticity", min_det, tol.ellipticity);
  c.detail = "worst_probe=" + std::to_string(worst);
  return c;
}

ThermoResult check_thermo(const ConstitutiveModel& model, const std::vector<State>& probes,
                          const AdmissibilityTolerances& tol) {
  ThermoResult out;
  double worst_sq = -1.0;
  for (std::size_t n = 0; n < probes.size(); ++n) {
    const State& s = probes[n];
    const Vec3 Rp = fd::energy_momentum_gradient(model, s) - model.velocity(s);
    const Ten2 RF = fd::energy_F_gradient(model, s) - model.stress(s);
    const double rp = norm(Rp);
    const double rF = norm(RF);
    out.residual_p = std::max(out.residual_p, rp);
    out.residual_F = std::max(out.residual_F, rF);
    if (rp * rp + rF * rF > worst_sq) {
      worst_sq = rp * rp + rF * rF;
      out.worst_probe = n;
      out.F_rate = RF;
      out.p_rate = Rp;
    }
  }
  out.check = Check::residual("thermo", std::max(out.residual_p, out.residual_F), tol.thermo);
  out.check.detail = "residual_p=" + std::to_string(out.residual_p) + " residual_F=" + std::to_string(out.residual_F);

  if (!probes.empty()) {
    // Rate of tau along the residual direction, by an independent central difference.
    const State& s = probes[out.worst_probe];
    const double dir = std::sqrt(std::max(worst_sq, 0.0));
    if (dir > 0.0) {
      const double h = 1e-5 * std::max(1.0, std::max(norm(s.F), norm(s.p))) / std::max(1.0, dir);
      const State plus{s.F + h * out.F_rate, s.p + h * out.p_rate};
      const State minus{s.F - h * out.F_rate, s.p - h * out.p_rate};
      const double tau_rate = (model.energy(plus) - model.energy(minus)) / (2.0 * h);
      out.dissipation_excess = tau_rate - ddot(model.stress(s), out.F_rate) - dot(model.velocity(s), out.p_rate);
    }
  }
  return out;
}

Check check_maxwell(const ConstitutiveModel& model, const std::vector<State>& probes,
                    const AdmissibilityTolerances& tol) {
  double worst = 0.0;
  for (const State& s : probes) {
    // A[ij][h] = dS_ij/dp_h
    std::array<Ten2, 3> dS_dp;
    const double hp = step_p(s.p);
    for (std::size_t h = 0; h < 3; ++h) {
      State plus = s, minus = s;
      plus.p[h] += hp;
      minus.p[h] -= hp;
      dS_dp[h] = (model.stress(plus) - model.stress(minus)) / (2.0 * hp);
    }
    // B[ij][h] = dv_h/dF_ij
    std::array<Vec3, 9> dv_dF;
    const double hF = step_F(s.F);
    for (std::size_t ij = 0; ij < 9; ++ij) {
      State plus = s, minus = s;
      plus.F.c[ij] += hF;
      minus.F.c[ij] -= hF;
      dv_dF[ij] = (model.velocity(plus) - model.velocity(minus)) / (2.0 * hF);
    }
    double sq = 0.0;
    for (std::size_t ij = 0; ij < 9; ++ij)
      for (std::size_t h = 0; h < 3; ++h) {
        const double d = dS_dp[h].c[ij] - dv_dF[ij][h];
        sq += d * d;
      }
    if (!std::isfinite(sq)) throw NonFinite("check_maxwell: non-finite derivative");
    worst = std::max(worst, std::sqrt(sq));
  }
  return Check::residual("maxwell", worst, tol.maxwell);
}

std::vector<Vec3> default_shifts(std::uint64_t seed) {
  ProbeRng rng(seed);
  std::vector<Vec3> out{Vec3::basis(0), Vec3::basis(1), Vec3::basis(2)};
  out.push_back(rng.in_ball(2.0));
  out.push_back(rng.in_ball(2.0));
  return out;
}

Check check_galilean(const ConstitutiveModel& model, const std::vector<State>& probes, const std::vector<Vec3>& shifts,
                     const AdmissibilityTolerances& tol) {
  double deviation = 0.0;
  for (const Vec3& d : shifts) {
    Vec3 lo{{+INFINITY, +INFINITY, +INFINITY}};
    Vec3 hi{{-INFINITY, -INFINITY, -INFINITY}};
    for (const State& s : probes) {
      const Vec3 diff = model.velocity({s.F, s.p + d}) - model.velocity(s);
      for (std::size_t i = 0; i < 3; ++i) {
        lo[i] = std::min(lo[i], diff[i]);
        hi[i] = std::max(hi[i], diff[i]);
      }
    }
    if (!probes.empty())
      for (std::size_t i = 0; i < 3; ++i) deviation = std::max(deviation, hi[i] - lo[i]);
  }
  return Check::residual("galilean", deviation, tol.galilean);
}

Check check_parity(const ConstitutiveModel& model, const std::vector<State>& probes,
                   const AdmissibilityTolerances& tol) {
  double worst = 0.0;
  for (const State& s : probes) worst = std::max(worst, std::abs(model.energy(s) - model.energy({s.F, -s.p})));
  return Check::residual("parity", worst, tol.parity);
}

std::vector<Check> AdmissibilityReport::checks() const {
  return {normality, ellipticity, thermo.check, maxwell, galilean, parity};
}

bool AdmissibilityReport::all_ok() const {
  const auto all = checks();
  return std::all_of(all.begin(), all.end(), [](const Check& c) { return c.ok; });
}

AdmissibilityReport assess(const ConstitutiveModel& model, const ProbeOptions& opts,
                           const AdmissibilityTolerances& tol) {
  const std::vector<State> probes = make_probes(opts);
  AdmissibilityReport r;
  r.probe_count = probes.size();
  r.seed = opts.seed;
  r.normality = check_normality(model, probes, tol);
  try {
    r.ellipticity = check_ellipticity(model, make_ellipticity_probes(model, probes, opts.seed + 1), tol);
  } catch (const NewtonDivergence& e) {
    r.ellipticity = Check::lower_bound("ellipticity", 0.0, tol.ellipticity);
    r.ellipticity.ok = false;
    r.ellipticity.detail = e.what();
  }
  r.thermo = check_thermo(model, probes, tol);
  r.maxwell = check_maxwell(model, probes, tol);
  r.galilean = check_galilean(model, probes, default_shifts(opts.seed + 2), tol);
  r.parity = check_parity(model, probes, tol);
  return r;
}

namespace {

std::string format_double(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(10) << x;
  return os.str();
}

const char* sense_name(Check::Sense s) { return s == Check::Sense::at_most ? "at_most" : "above"; }

}  // namespace

void write_key_value(std::ostream& os, const AdmissibilityReport& report) {
  os << "probes = " << report.probe_count << "\n";
  os << "seed = " << report.seed << "\n";
  for (const Check& c : report.checks()) {
    os << c.name << "_ok = " << (c.ok ? "true" : "false") << "\n";
    os << c.name << "_value = " << format_double(c.value) << "\n";
    os << c.name << "_tolerance = " << format_double(c.tolerance) << "\n";
  }
  os << "thermo_residual_p = " << format_double(report.thermo.residual_p) << "\n";
  os << "thermo_residual_F = " << format_double(report.thermo.residual_F) << "\n";
  os << "thermo_worst_probe = " << report.thermo.worst_probe << "\n";
  os << "thermo_dissipation_excess = " << format_double(report.thermo.dissipation_excess) << "\n";
  os << "all_ok = " << (report.all_ok() ? "true" : "false") << "\n";
}

void write_csv(std::ostream& os, const AdmissibilityReport& report) {
  os << "check,value,tolerance,sense,pass\n";
  for (const Check& c : report.checks()) {
    os << c.name << ',' << format_double(c.value) << ',' << format_double(c.tolerance) << ',' << sense_name(c.sense)
       << ',' << (c.ok ? 1 : 0) << "\n";
  }
}

bool RepresentationResult::ok(const AdmissibilityTolerances& tol) const {
  return symmetry_residual <= tol.symmetry && linearity_residual <= tol.linearity && split_residual <= tol.split;
}

RepresentationResult extract_representation(const ConstitutiveModel& model, const std::vector<State>& probes,
                                            const AdmissibilityTolerances& tol) {
  if (probes.size() < 3) throw FitDegenerate("extract_representation: need at least three probes");
  std::string failed;
  if (!check_normality(model, probes, tol).ok) failed += " normality";
  if (!check_galilean(model, probes, default_shifts(17), tol).ok) failed += " galilean";
  if (!check_parity(model, probes, tol).ok) failed += " parity";
  if (!failed.empty()) throw PreconditionFailed("extract_representation: failed preconditions:" + failed);

  const Ten2 F0 = probes.front().F;
  const std::size_t n_fit = (probes.size() + 1) / 2;

  // V = (sum v p^T)(sum p p^T)^{-1}
  Ten2 P, Q;
  for (std::size_t n = 0; n < n_fit; ++n) {
    const Vec3& p = probes[n].p;
    P += outer(p, p);
    Q += outer(model.velocity({F0, p}), p);
  }
  const SymEigen gram = eig_sym(P);
  if (!(gram.values[2] > 1e-10 * std::max(gram.values[0], 1e-300))) {
    throw FitDegenerate("extract_representation: momentum probes are rank-deficient");
  }
  RepresentationResult r;
  r.V_fit = Q * inverse(P);
  try {
    r.M_fit = inverse(r.V_fit);
  } catch (const Singular&) {
    throw FitDegenerate("extract_representation: fitted V is singular");
  }
  r.symmetry_residual = asymmetry(r.V_fit);

  double lin = 0.0;
  for (std::size_t n = n_fit; n < probes.size(); ++n) {
    const Vec3& p = probes[n].p;
    lin = std::max(lin, norm(model.velocity({F0, p}) - r.V_fit * p));
  }
  for (const State& s : probes) lin = std::max(lin, norm(model.velocity(s) - r.V_fit * s.p));
  r.linearity_residual = lin;

  auto energy = model.energy;
  r.sigma_fit = [energy](const Ten2& F) { return energy({F, Vec3{}}); };
  double split = 0.0;
  for (const State& s : probes) {
    const double predicted = r.sigma_fit(s.F) + 0.5 * dot(s.p, r.V_fit * s.p);
    split = std::max(split, std::abs(model.energy(s) - predicted));
  }
  r.split_residual = split;
  return r;
}

InitialRates initial_rate_check(const ConstitutiveModel& model, const Ten2& A, const Ten2& B, const Vec3& a,
                                const Vec3& b, const Vec3& c, const AdmissibilityTolerances& tol) {
  if (std::abs(norm(a) - 1.0) > 1e-12) throw NotUnit("initial_rate_check: a must be a unit vector");
  InitialRates r;
  r.momentum = momentum_from_velocity(model, A, c);
  r.ellipticity = ellipticity_matrix(model, A, c, a, r.momentum);
  if (!(std::abs(det(r.ellipticity)) > tol.ellipticity)) {
    throw PreconditionFailed("initial_rate_check: E(A, c; a) is not invertible");
  }
  const std::array<Ten2, 3> dS_dv = stress_velocity_jacobian(model, A, c, r.momentum);
  Vec3 coupling;
  for (std::size_t i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t j = 0; j < 3; ++j) acc += dS_dv[k](i, j) * B(k, j);
    coupling[i] = acc;
  }
  r.coupling = coupling;
  r.F_rate = B;
  r.p_rate = coupling + r.ellipticity * b;
  return r;
}

Vec3 solve_rate_amplitude(const ConstitutiveModel& model, const Ten2& A, const Ten2& B, const Vec3& a, const Vec3& c,
                          const Vec3& target) {
  const InitialRates base = initial_rate_check(model, A, B, a, Vec3{}, c);
  return inverse(base.ellipticity) * (target - base.coupling);
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::normality: return "normality";
    case Violation::ellipticity: return "ellipticity";
    case Violation::thermo: return "thermo";
    case Violation::maxwell: return "maxwell";
    case Violation::galilean: return "galilean";
    case Violation::parity: return "parity";
  }
  return "unknown";
}

std::vector<Violation> all_violations() {
  return {Violation::normality, Violation::ellipticity, Violation::thermo,
          Violation::maxwell,   Violation::galilean,    Violation::parity};
}

std::optional<Violation> violation_from_string(const std::string& name) {
  for (Violation v : all_violations())
    if (to_string(v) == name) return v;
  return std::nullopt;
}

ConstitutiveModel negative_control(Violation kind, const StoredEnergy& se, double rho) {
  const ConstitutiveModel base = classical_model(rho, se);
  ConstitutiveModel m = base;
  m.name = "control_" + to_string(kind) + "/" + se.name;
  switch (kind) {
    case Violation::normality: {
      // v = |p|^2 p / rho has a vanishing Jacobian at p = 0
      auto sigma = se.sigma;
      m.energy = [rho, sigma](const State& s) {
        const double pp = dot(s.p, s.p);
        return 0.25 * pp * pp / rho + sigma(s.F);
      };
      m.velocity = [rho](const State& s) { return (dot(s.p, s.p) / rho) * s.p; };
      break;
    }
    case Violation::ellipticity: {
      m.energy = [rho](const State& s) { return dot(s.p, s.p) / (2.0 * rho); };
      m.stress = [](const State&) { return Ten2::zero(); };
      m.elasticity = [](const Ten2&) { return Ten4::zero(); };
      break;
    }
    case Violation::thermo: {
      auto stress = base.stress;
      auto elasticity = base.elasticity;
      m.stress = [stress](const State& s) { return 1.1 * stress(s); };
      m.elasticity = [elasticity](const Ten2& F) { return 1.1 * elasticity(F); };
      break;
    }
    case Violation::maxwell: {
      m.velocity = [rho](const State& s) { return s.p / rho + column(s.F, 0); };
      break;
    }
    case Violation::galilean: {
      // rho(F) = rho (1 + |F - 1|^2), with the energy-consistent stress
      auto sigma = se.sigma;
      auto stress = base.stress;
      auto density = [rho](const Ten2& F) {
        const Ten2 d = F - Ten2::identity();
        return rho * (1.0 + ddot(d, d));
      };
      m.energy = [sigma, density](const State& s) { return dot(s.p, s.p) / (2.0 * density(s.F)) + sigma(s.F); };
      m.velocity = [density](const State& s) { return s.p / density(s.F); };
      m.stress = [rho, stress, density](const State& s) {
        const double r = density(s.F);
        return stress(s) - (rho * dot(s.p, s.p) / (r * r)) * (s.F - Ten2::identity());
      };
      m.elasticity = nullptr;
      break;
    }
    case Violation::parity: {
      auto energy = base.energy;
      m.energy = [energy](const State& s) { return energy(s) + s.p[0]; };
      m.velocity = [rho](const State& s) { return s.p / rho + Vec3::basis(0); };
      break;
    }
  }
  return m;
}

}  // namespace fpcons
