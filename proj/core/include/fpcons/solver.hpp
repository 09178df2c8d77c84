#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fpcons/constitutive.hpp"

namespace fpcons {

/// Periodic cell-centred grid in 1 or 3 dimensions (axis 0 is always active).
struct Grid {
  int dims = 1;
  std::array<int, 3> cells{4, 1, 1};
  std::array<double, 3> h{0.25, 1.0, 1.0};

  static Grid line(int n, double length);
  static Grid cube(int n, double length);

  /// Throws DomainError unless cells >= 4 and h > 0 on every active axis.
  void validate() const;
  bool active(int axis) const { return axis < dims; }
  std::size_t size() const;
  std::size_t index(int i, int j, int k) const;
  std::array<int, 3> coords(std::size_t idx) const;
  /// Periodic neighbour along `axis`.
  std::size_t neighbor(std::size_t idx, int axis, int offset) const;
  /// Cell centre; inactive coordinates are 0.
  Vec3 center(std::size_t idx) const;
  double cell_volume() const;
  double length(int axis) const { return cells[axis] * h[axis]; }
};

struct Field {
  Grid grid;
  std::vector<State> cells;
  double t = 0.0;
  bool valid = true;
};

/// Flux of (F, p) along one axis: (-v⊗c_α, -S c_α).
struct AxisFlux {
  Ten2 F;
  Vec3 p;
};

AxisFlux flux(const ConstitutiveModel& model, const State& U, int axis);
std::array<AxisFlux, 3> flux(const ConstitutiveModel& model, const State& U);

/// Largest characteristic speed along `direction` at U: sqrt of the largest
/// eigenvalue of E(w) N with N = dv/dp. Throws NonHyperbolicState when E(w) has a
/// negative eigenvalue or the speeds are not real.
double local_wave_speed(const ConstitutiveModel& model, const State& U, const Vec3& direction);

struct SpeedField {
  std::vector<std::array<double, 3>> speed;  // per cell, per axis (0 on inactive axes)
  double max_speed = 0.0;
};

SpeedField wave_speeds(const ConstitutiveModel& model, const Field& field);

/// cfl * min h / (active dims * max_speed).
double stable_dt(const Grid& grid, double max_speed, double cfl);

/// One explicit local Lax-Friedrichs (Rusanov) update with a given time step.
/// Throws Blowup when any component becomes non-finite or exceeds 1e12.
Field advance(const ConstitutiveModel& model, const Field& field, double dt, const SpeedField& speeds);

struct StepResult {
  Field field;
  double dt = 0.0;
  double max_speed = 0.0;
};

/// Throws DomainError unless 0 < cfl <= 1, NonHyperbolicState, Blowup.
StepResult step_lax_friedrichs(const ConstitutiveModel& model, const Field& field, double cfl);

/// F = A + (a·(x - x0)) b⊗a, v = B(x - x0) + c, sampled at cell centres.
struct AffineData {
  Ten2 A = Ten2::identity();
  Ten2 B;
  Vec3 a{{1.0, 0.0, 0.0}};
  Vec3 b;
  Vec3 c;
  Vec3 x0;
};

Field affine_initial_field(const ConstitutiveModel& model, const Grid& grid, const AffineData& data);

/// Travelling plane wave along axis 0 on the reference state:
/// F = 1 + ε sin(2πm x/L) u⊗c_1, v = -c ε sin(2πm x/L) u.
struct SineWave {
  double amplitude = 1e-3;
  int mode = 1;
  Vec3 polarization{{1.0, 0.0, 0.0}};
  /// Defaults to sqrt(u·E(c_1)N u / u·u) at the reference state.
  std::optional<double> speed;
};

Field sine_wave_field(const ConstitutiveModel& model, const Grid& grid, const SineWave& wave);
double sine_wave_speed(const ConstitutiveModel& model, const SineWave& wave);

struct Totals {
  Vec3 momentum;
  Ten2 F;
  double momentum_scale = 0.0;  // sum |p| dV
  double F_scale = 0.0;         // sum |F| dV
};

Totals totals(const Field& field);
double total_energy(const ConstitutiveModel& model, const Field& field);
/// max over cells and axis pairs of |D_b(F c_a) - D_a(F c_b)|, central differences.
double involution_residual(const Field& field);
/// max over cells of |(tau(U1) - tau(U0))/dt - S(U0)·(F1-F0)/dt - v(U0)·(p1-p0)/dt|.
double dissipation_residual(const ConstitutiveModel& model, const Field& before, const Field& after, double dt);

struct MonitorRecord {
  std::size_t step = 0;
  double t = 0.0;
  double energy = 0.0;
  double boundary_flux = 0.0;  // identically zero on periodic grids
  double drift = 0.0;          // energy - initial energy
  double involution = 0.0;
  double dissipation = 0.0;
  double momentum_drift = 0.0; // max |total p - initial| / sum|p| dV
  double F_drift = 0.0;        // max |total F - initial| / sum|F| dV
};

struct MonitorTrace {
  std::vector<MonitorRecord> records;
};

struct RunResult {
  Field field;
  MonitorTrace trace;
  std::size_t steps = 0;
};

struct RunOptions {
  double cfl = 0.5;
  std::size_t monitor_every = 1;
  /// Called after every completed step.
  std::function<void(const Field&, std::size_t step)> on_step;
  std::size_t max_steps = 10'000'000;
};

/// Steps until t_end (the last step is shortened to land on it). In 3-D the time
/// step is refreshed every 10 steps from 1.2 x the max speed.
/// Throws DomainError (t_end <= 0), NonHyperbolicState, Blowup.
RunResult run(const ConstitutiveModel& model, const Field& initial, double t_end, const RunOptions& opts = {});

void write_snapshot_csv(std::ostream& os, const ConstitutiveModel& model, const Field& field);
void write_monitor_csv(std::ostream& os, const MonitorTrace& trace);

/// Shift s in (-L/2, L/2] maximising the circular cross-correlation, i.e.
/// shifted(x) ≈ reference(x - s). Sub-cell accuracy by parabolic peak fit.
double correlation_lag(std::span<const double> reference, std::span<const double> shifted, double length);

}  // namespace fpcons
