#include "fpcons/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "fpcons/dense.hpp"
#include "fpcons/errors.hpp"
#include "fpcons/hyperbolicity.hpp"

namespace fpcons {

namespace {

constexpr double kBlowup = 1e12;

int active_dims(const Grid& g) { return g.dims == 3 ? 3 : 1; }

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

bool state_ok(const State& s) {
  return is_finite(s.F) && is_finite(s.p) && max_abs(s.F) <= kBlowup && max_abs(s.p) <= kBlowup;
}

// Symmetric square root of an SPD matrix; empty when not SPD.
std::optional<Ten2> spd_sqrt(const Ten2& n) {
  double scale = std::max(1e-300, max_abs(n));
  if (asymmetry(n) > 1e-6 * scale) return std::nullopt;
  SymEigen es = eig_sym(sym(n));
  if (es.values[2] <= 1e-12 * scale) return std::nullopt;
  Ten2 r;
  for (int k = 0; k < 3; ++k) r = r + std::sqrt(es.values[k]) * outer(es.vectors[k], es.vectors[k]);
  return r;
}

}  // namespace

Grid Grid::line(int n, double length) {
  Grid g;
  g.dims = 1;
  g.cells = {n, 1, 1};
  g.h = {length / n, 1.0, 1.0};
  g.validate();
  return g;
}

Grid Grid::cube(int n, double length) {
  Grid g;
  g.dims = 3;
  g.cells = {n, n, n};
  g.h = {length / n, length / n, length / n};
  g.validate();
  return g;
}

void Grid::validate() const {
  if (dims != 1 && dims != 3) throw DomainError("grid dims must be 1 or 3");
  for (int a = 0; a < active_dims(*this); ++a) {
    if (cells[a] < 4) throw DomainError("grid needs at least 4 cells per active axis");
    if (!(h[a] > 0.0) || !std::isfinite(h[a])) throw DomainError("grid spacing must be positive");
  }
}

std::size_t Grid::size() const {
  std::size_t n = static_cast<std::size_t>(cells[0]);
  if (dims == 3) n *= static_cast<std::size_t>(cells[1]) * static_cast<std::size_t>(cells[2]);
  return n;
}

std::size_t Grid::index(int i, int j, int k) const {
  if (dims != 3) return static_cast<std::size_t>(i);
  return (static_cast<std::size_t>(k) * cells[1] + j) * cells[0] + i;
}

std::array<int, 3> Grid::coords(std::size_t idx) const {
  if (dims != 3) return {static_cast<int>(idx), 0, 0};
  int i = static_cast<int>(idx % cells[0]);
  idx /= cells[0];
  int j = static_cast<int>(idx % cells[1]);
  int k = static_cast<int>(idx / cells[1]);
  return {i, j, k};
}

std::size_t Grid::neighbor(std::size_t idx, int axis, int offset) const {
  auto c = coords(idx);
  c[axis] = wrap(c[axis] + offset, cells[axis]);
  return index(c[0], c[1], c[2]);
}

Vec3 Grid::center(std::size_t idx) const {
  auto c = coords(idx);
  Vec3 x;
  for (int a = 0; a < active_dims(*this); ++a) x[a] = (c[a] + 0.5) * h[a];
  return x;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < active_dims(*this); ++a) v *= h[a];
  return v;
}

AxisFlux flux(const ConstitutiveModel& model, const State& U, int axis) {
  Vec3 v = model.velocity(U);
  Ten2 S = model.stress(U);
  AxisFlux f;
  for (int i = 0; i < 3; ++i) {
    f.F(i, axis) = -v[i];
    f.p[i] = -S(i, axis);
  }
  return f;
}

std::array<AxisFlux, 3> flux(const ConstitutiveModel& model, const State& U) {
  Vec3 v = model.velocity(U);
  Ten2 S = model.stress(U);
  std::array<AxisFlux, 3> out;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i) {
      out[a].F(i, a) = -v[i];
      out[a].p[i] = -S(i, a);
    }
  return out;
}

double local_wave_speed(const ConstitutiveModel& model, const State& U, const Vec3& direction) {
  Ten4 S4 = elasticity_tensor(model, U);
  AcousticTensor ac = acoustic_tensor(S4, direction);
  double scale = std::max(1.0, std::abs(ac.eigenvalues[0]));
  if (ac.eigenvalues[2] < -1e-12 * scale)
    throw NonHyperbolicState("acoustic tensor has a negative eigenvalue");
  Ten2 N = fd::velocity_momentum_jacobian(model, U);
  double top = 0.0;
  if (auto root = spd_sqrt(N)) {
    SymEigen es = eig_sym(sym(*root * ac.E * *root));
    top = es.values[0];
  } else {
    Ten2 EN = ac.E * N;
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = EN(i, j);
    double mscale = std::max(1.0, m.max_abs());
    for (const Complex& z : eigenvalues_general(m)) {
      if (std::abs(z.imag()) > 1e-9 * mscale || z.real() < -1e-12 * mscale)
        throw NonHyperbolicState("characteristic speeds are not real");
      top = std::max(top, z.real());
    }
  }
  if (!std::isfinite(top)) throw NonHyperbolicState("non-finite characteristic speed");
  return std::sqrt(std::max(0.0, top));
}

SpeedField wave_speeds(const ConstitutiveModel& model, const Field& field) {
  SpeedField sf;
  sf.speed.assign(field.cells.size(), {0.0, 0.0, 0.0});
  int dims = active_dims(field.grid);
  for (std::size_t c = 0; c < field.cells.size(); ++c)
    for (int a = 0; a < dims; ++a) {
      double s = local_wave_speed(model, field.cells[c], Vec3::basis(a));
      sf.speed[c][a] = s;
      sf.max_speed = std::max(sf.max_speed, s);
    }
  return sf;
}

double stable_dt(const Grid& grid, double max_speed, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("cfl must lie in (0, 1]");
  double hmin = grid.h[0];
  for (int a = 1; a < active_dims(grid); ++a) hmin = std::min(hmin, grid.h[a]);
  if (!(max_speed > 0.0)) return std::numeric_limits<double>::infinity();
  return cfl * hmin / (active_dims(grid) * max_speed);
}

Field advance(const ConstitutiveModel& model, const Field& field, double dt, const SpeedField& speeds) {
  const Grid& g = field.grid;
  const std::size_t n = field.cells.size();
  const int dims = active_dims(g);
  std::vector<std::array<AxisFlux, 3>> f(n);
  for (std::size_t c = 0; c < n; ++c) f[c] = flux(model, field.cells[c]);

  Field out = field;
  std::vector<AxisFlux> iface(n);  // numerical flux through the upper face of each cell
  for (int a = 0; a < dims; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t r = g.neighbor(c, a, 1);
      double s = std::max(speeds.speed[c][a], speeds.speed[r][a]);
      const State& L = field.cells[c];
      const State& R = field.cells[r];
      iface[c].F = 0.5 * (f[c][a].F + f[r][a].F) - 0.5 * s * (R.F - L.F);
      iface[c].p = 0.5 * (f[c][a].p + f[r][a].p) - 0.5 * s * (R.p - L.p);
    }
    double k = dt / g.h[a];
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t l = g.neighbor(c, a, -1);
      out.cells[c].F = out.cells[c].F - k * (iface[c].F - iface[l].F);
      out.cells[c].p = out.cells[c].p - k * (iface[c].p - iface[l].p);
    }
  }
  for (const State& s : out.cells)
    if (!state_ok(s)) {
      out.valid = false;
      throw Blowup("solution blew up (non-finite or |U| > 1e12)");
    }
  out.t = field.t + dt;
  return out;
}

StepResult step_lax_friedrichs(const ConstitutiveModel& model, const Field& field, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("cfl must lie in (0, 1]");
  SpeedField sf = wave_speeds(model, field);
  double dt = stable_dt(field.grid, sf.max_speed, cfl);
  if (!std::isfinite(dt)) throw DomainError("zero wave speed: time step undefined");
  StepResult r{advance(model, field, dt, sf), dt, sf.max_speed};
  return r;
}

Field affine_initial_field(const ConstitutiveModel& model, const Grid& grid, const AffineData& d) {
  grid.validate();
  Field f;
  f.grid = grid;
  f.cells.resize(grid.size());
  Ten2 ba = outer(d.b, d.a);
  for (std::size_t c = 0; c < f.cells.size(); ++c) {
    Vec3 y = grid.center(c) - d.x0;
    State& s = f.cells[c];
    s.F = d.A + dot(d.a, y) * ba;
    s.p = momentum_from_velocity(model, s.F, d.B * y + d.c);
  }
  return f;
}

double sine_wave_speed(const ConstitutiveModel& model, const SineWave& wave) {
  if (wave.speed) return *wave.speed;
  State ref;
  Ten4 S4 = elasticity_tensor(model, ref);
  AcousticTensor ac = acoustic_tensor(S4, Vec3::basis(0));
  Ten2 N = fd::velocity_momentum_jacobian(model, ref);
  const Vec3& u = wave.polarization;
  double q = dot(u, ac.E * (N * u)) / dot(u, u);
  if (!(q >= 0.0)) throw NonHyperbolicState("imaginary wave speed for the requested polarization");
  return std::sqrt(q);
}

Field sine_wave_field(const ConstitutiveModel& model, const Grid& grid, const SineWave& wave) {
  grid.validate();
  if (norm(wave.polarization) == 0.0) throw DomainError("sine wave polarization must be non-zero");
  double c = sine_wave_speed(model, wave);
  double L = grid.length(0);
  Field f;
  f.grid = grid;
  f.cells.resize(grid.size());
  for (std::size_t i = 0; i < f.cells.size(); ++i) {
    double x = grid.center(i)[0];
    double s = wave.amplitude * std::sin(2.0 * std::numbers::pi * wave.mode * x / L);
    State& st = f.cells[i];
    st.F = Ten2::identity() + s * outer(wave.polarization, Vec3::basis(0));
    st.p = momentum_from_velocity(model, st.F, -c * s * wave.polarization);
  }
  return f;
}

Totals totals(const Field& field) {
  Totals t;
  double dv = field.grid.cell_volume();
  for (const State& s : field.cells) {
    t.momentum += dv * s.p;
    t.F = t.F + dv * s.F;
    t.momentum_scale += dv * norm(s.p);
    t.F_scale += dv * norm(s.F);
  }
  return t;
}

double total_energy(const ConstitutiveModel& model, const Field& field) {
  double e = 0.0;
  for (const State& s : field.cells) e += model.energy(s);
  return e * field.grid.cell_volume();
}

double involution_residual(const Field& field) {
  const Grid& g = field.grid;
  if (active_dims(g) < 2) return 0.0;  // only the first column varies: curl vanishes identically
  double worst = 0.0;
  for (std::size_t c = 0; c < field.cells.size(); ++c) {
    std::array<Ten2, 3> D;  // D[α] = ∂_α F
    for (int a = 0; a < 3; ++a) {
      const Ten2& fp = field.cells[g.neighbor(c, a, 1)].F;
      const Ten2& fm = field.cells[g.neighbor(c, a, -1)].F;
      D[a] = (fp - fm) / (2.0 * g.h[a]);
    }
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        Vec3 r;
        for (int i = 0; i < 3; ++i) r[i] = D[b](i, a) - D[a](i, b);
        worst = std::max(worst, norm(r));
      }
  }
  return worst;
}

double dissipation_residual(const ConstitutiveModel& model, const Field& before, const Field& after, double dt) {
  double worst = 0.0;
  for (std::size_t c = 0; c < before.cells.size(); ++c) {
    const State& u0 = before.cells[c];
    const State& u1 = after.cells[c];
    Ten2 dF = (u1.F - u0.F) / dt;
    Vec3 dp = (u1.p - u0.p) / dt;
    double r = (model.energy(u1) - model.energy(u0)) / dt - ddot(model.stress(u0), dF) -
               dot(model.velocity(u0), dp);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

namespace {

struct Baseline {
  double energy;
  Totals totals;
};

MonitorRecord make_record(const ConstitutiveModel& model, const Field& f, std::size_t step, const Baseline& base,
                          double dissipation) {
  MonitorRecord r;
  r.step = step;
  r.t = f.t;
  r.energy = total_energy(model, f);
  r.drift = r.energy - base.energy;
  r.involution = involution_residual(f);
  r.dissipation = dissipation;
  Totals t = totals(f);
  r.momentum_drift = max_abs(t.momentum - base.totals.momentum) / std::max(1e-300, base.totals.momentum_scale);
  if (base.totals.momentum_scale == 0.0) r.momentum_drift = max_abs(t.momentum - base.totals.momentum);
  r.F_drift = max_abs(t.F - base.totals.F) / std::max(1e-300, base.totals.F_scale);
  return r;
}

}  // namespace

RunResult run(const ConstitutiveModel& model, const Field& initial, double t_end, const RunOptions& opts) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be positive");
  if (!(opts.cfl > 0.0 && opts.cfl <= 1.0)) throw DomainError("cfl must lie in (0, 1]");
  initial.grid.validate();
  const std::size_t every = std::max<std::size_t>(1, opts.monitor_every);
  const bool three_d = active_dims(initial.grid) == 3;

  RunResult res;
  res.field = initial;
  Baseline base{total_energy(model, initial), totals(initial)};
  res.trace.records.push_back(make_record(model, initial, 0, base, 0.0));

  double dt_cached = 0.0;
  const double t0 = initial.t;
  const double t_stop = t0 + t_end;
  std::size_t step = 0;
  while (res.field.t < t_stop - 1e-14 * std::max(1.0, std::abs(t_stop))) {
    if (step >= opts.max_steps) throw DomainError("step limit reached before t_end");
    SpeedField sf = wave_speeds(model, res.field);
    double dt;
    if (three_d) {
      if (step % 10 == 0) dt_cached = stable_dt(res.field.grid, 1.2 * sf.max_speed, opts.cfl);
      dt = dt_cached;
    } else {
      dt = stable_dt(res.field.grid, sf.max_speed, opts.cfl);
    }
    if (!std::isfinite(dt)) throw DomainError("zero wave speed: time step undefined");
    bool last = res.field.t + dt >= t_stop;
    if (last) dt = t_stop - res.field.t;
    Field next = advance(model, res.field, dt, sf);
    if (last) next.t = t_stop;
    ++step;
    if (step % every == 0 || last) {
      double diss = dissipation_residual(model, res.field, next, dt);
      res.trace.records.push_back(make_record(model, next, step, base, diss));
    }
    res.field = std::move(next);
    if (opts.on_step) opts.on_step(res.field, step);
  }
  res.steps = step;
  return res;
}

void write_snapshot_csv(std::ostream& os, const ConstitutiveModel& model, const Field& field) {
  os << "cell,x1,x2,x3,F11,F12,F13,F21,F22,F23,F31,F32,F33,p1,p2,p3,v1,v2,v3,energy\n";
  os.precision(12);
  for (std::size_t c = 0; c < field.cells.size(); ++c) {
    const State& s = field.cells[c];
    Vec3 x = field.grid.center(c);
    Vec3 v = model.velocity(s);
    os << c << ',' << x[0] << ',' << x[1] << ',' << x[2];
    for (double e : s.F.c) os << ',' << e;
    for (double e : s.p.c) os << ',' << e;
    for (double e : v.c) os << ',' << e;
    os << ',' << model.energy(s) << '\n';
  }
}

void write_monitor_csv(std::ostream& os, const MonitorTrace& trace) {
  os << "step,t,energy,drift,involution,dissipation,boundary_flux,momentum_drift,F_drift\n";
  os.precision(12);
  for (const MonitorRecord& r : trace.records)
    os << r.step << ',' << r.t << ',' << r.energy << ',' << r.drift << ',' << r.involution << ','
       << r.dissipation << ',' << r.boundary_flux << ',' << r.momentum_drift << ',' << r.F_drift << '\n';
}

double correlation_lag(std::span<const double> reference, std::span<const double> shifted, double length) {
  const std::size_t n = reference.size();
  if (n < 3 || shifted.size() != n) throw DomainError("correlation_lag needs equal-length series of size >= 3");
  auto corr = [&](std::size_t m) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += reference[i] * shifted[(i + m) % n];
    return s;
  };
  std::vector<double> c(n);
  std::size_t best = 0;
  for (std::size_t m = 0; m < n; ++m) {
    c[m] = corr(m);
    if (c[m] > c[best]) best = m;
  }
  double cm = c[(best + n - 1) % n];
  double c0 = c[best];
  double cp = c[(best + 1) % n];
  double denom = cm - 2.0 * c0 + cp;
  double frac = denom < 0.0 ? 0.5 * (cm - cp) / denom : 0.0;
  double h = length / static_cast<double>(n);
  double s = (static_cast<double>(best) + frac) * h;
  s = std::fmod(s, length);
  if (s > 0.5 * length) s -= length;
  if (s <= -0.5 * length) s += length;
  return s;
}

}  // namespace fpcons
