#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fpcons/constitutive.hpp"

namespace fpcons {

struct AdmissibilityTolerances {
  double normality = 1e-8;    // on min |det N|
  double ellipticity = 1e-8;  // on min |det E|
  double thermo = 1e-5;
  double maxwell = 1e-5;
  double galilean = 1e-9;
  double parity = 1e-9;
  double split = 1e-6;
  double linearity = 1e-8;
  double symmetry = 1e-9;
};

struct ProbeOptions {
  std::size_t count = 100;
  std::uint64_t seed = 20240611;
  double det_min = 0.3;
  double det_max = 1e300;
  double momentum_radius = 3.0;
};

/// Random probe states: F = 1 + R/2 with R_ij uniform in [-1, 1] (rejected unless
/// det F lies in [det_min, det_max]), p uniform in the ball. Probe 0 has p = 0.
std::vector<State> make_probes(const ProbeOptions& opts = {});

/// Deterministic stream of uniform numbers in [0, 1), stable across platforms.
class ProbeRng {
 public:
  explicit ProbeRng(std::uint64_t seed);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vec3 unit_vector();
  Vec3 in_ball(double radius);

 private:
  std::uint64_t state_;
};

/// Outcome of one check. `value` is a residual (pass iff value <= tolerance) or,
/// for the invertibility checks, a minimum determinant (pass iff value > tolerance).
struct Check {
  enum class Sense { at_most, above };
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Sense sense = Sense::at_most;
  bool ok = false;
  std::string detail;

  static Check residual(std::string name, double value, double tol);
  static Check lower_bound(std::string name, double value, double tol);
};

struct EllipticityProbe {
  Ten2 F;
  Vec3 v;
  Vec3 a;       // unit direction
  Vec3 p_seed;  // Newton seed for the momentum inversion
};

/// v = velocity(probe), a random unit direction per probe.
std::vector<EllipticityProbe> make_ellipticity_probes(const ConstitutiveModel& model, const std::vector<State>& probes,
                                                      std::uint64_t seed);

/// Stress as a function of (F, v): S(F, p(F, v)).
Ten2 stress_at_velocity(const ConstitutiveModel& model, const Ten2& F, const Vec3& v, const Vec3& p_seed);
/// d S~_ij / d F_hk at fixed velocity.
Ten4 stress_F_jacobian_at_velocity(const ConstitutiveModel& model, const Ten2& F, const Vec3& v, const Vec3& p_seed);
/// d S~_ij / d v_k, returned as one Ten2 per k.
std::array<Ten2, 3> stress_velocity_jacobian(const ConstitutiveModel& model, const Ten2& F, const Vec3& v,
                                             const Vec3& p_seed);
/// E_ih(F, v; a) = d S~_ij / d F_hk a_j a_k.
Ten2 ellipticity_matrix(const ConstitutiveModel& model, const Ten2& F, const Vec3& v, const Vec3& a,
                        const Vec3& p_seed);

Check check_normality(const ConstitutiveModel& model, const std::vector<State>& probes,
                      const AdmissibilityTolerances& tol = {});
Check check_ellipticity(const ConstitutiveModel& model, const std::vector<EllipticityProbe>& probes,
                        const AdmissibilityTolerances& tol = {});

/// Energy-derivative residuals plus a rate direction along which the dissipation
/// inequality tau' <= S·F' + v·p' fails (when the residual is nonzero).
struct ThermoResult {
  Check check;
  double residual_p = 0.0;  // max |d tau/dp - v|
  double residual_F = 0.0;  // max |d tau/dF - S|
  std::size_t worst_probe = 0;
  Ten2 F_rate;
  Vec3 p_rate;
  /// tau' - S·F' - v·p' along (F_rate, p_rate); positive means a violation.
  double dissipation_excess = 0.0;
};

ThermoResult check_thermo(const ConstitutiveModel& model, const std::vector<State>& probes,
                          const AdmissibilityTolerances& tol = {});
/// max |dS/dp - dv/dF| over probes, both as 3x3x3 arrays.
Check check_maxwell(const ConstitutiveModel& model, const std::vector<State>& probes,
                    const AdmissibilityTolerances& tol = {});
/// For each shift d, the spread across probes of v(F, p + d) - v(F, p).
Check check_galilean(const ConstitutiveModel& model, const std::vector<State>& probes, const std::vector<Vec3>& shifts,
                     const AdmissibilityTolerances& tol = {});
std::vector<Vec3> default_shifts(std::uint64_t seed);
Check check_parity(const ConstitutiveModel& model, const std::vector<State>& probes,
                   const AdmissibilityTolerances& tol = {});

struct AdmissibilityReport {
  Check normality;
  Check ellipticity;
  ThermoResult thermo;
  Check maxwell;
  Check galilean;
  Check parity;
  std::size_t probe_count = 0;
  std::uint64_t seed = 0;

  std::vector<Check> checks() const;
  bool all_ok() const;
};

AdmissibilityReport assess(const ConstitutiveModel& model, const ProbeOptions& probes = {},
                           const AdmissibilityTolerances& tol = {});

/// Flat `key = value` block.
void write_key_value(std::ostream& os, const AdmissibilityReport& report);
/// CSV rows: check,value,tolerance,sense,pass.
void write_csv(std::ostream& os, const AdmissibilityReport& report);

struct RepresentationResult {
  Ten2 V_fit;
  Ten2 M_fit;
  double symmetry_residual = 0.0;
  double linearity_residual = 0.0;
  double split_residual = 0.0;
  std::function<double(const Ten2&)> sigma_fit;

  bool ok(const AdmissibilityTolerances& tol = {}) const;
};

/// Least-squares fit of p -> v(F0, p) at F0 = probes[0].F, certified on held-out
/// momenta and on every probe F, plus the energy split tau = sigma(F) + p·Vp/2.
/// Throws PreconditionFailed when normality, Galilean variance or parity fail;
/// FitDegenerate when the momentum samples are rank-deficient.
RepresentationResult extract_representation(const ConstitutiveModel& model, const std::vector<State>& probes,
                                            const AdmissibilityTolerances& tol = {});

/// Initial rates at x0 for affine data F = A + a·(x - x0)(b⊗a), v = B(x - x0) + c.
struct InitialRates {
  Ten2 F_rate;            // = B
  Vec3 p_rate;            // = dS~/dv_k B_kj + E(A, c; a) b
  Vec3 coupling;          // the dS~/dv_k B_kj part
  Ten2 ellipticity;       // E(A, c; a)
  Vec3 momentum;          // p(A, c)
};

InitialRates initial_rate_check(const ConstitutiveModel& model, const Ten2& A, const Ten2& B, const Vec3& a,
                                const Vec3& b, const Vec3& c, const AdmissibilityTolerances& tol = {});
/// The b for which the momentum rate equals `target` (requires E(A, c; a) invertible).
Vec3 solve_rate_amplitude(const ConstitutiveModel& model, const Ten2& A, const Ten2& B, const Vec3& a, const Vec3& c,
                          const Vec3& target);

/// Models built to break one restriction each.
enum class Violation { normality, ellipticity, thermo, maxwell, galilean, parity };

std::string to_string(Violation v);
std::optional<Violation> violation_from_string(const std::string& name);
std::vector<Violation> all_violations();
ConstitutiveModel negative_control(Violation v, const StoredEnergy& se, double rho = 1.0);

}  // namespace fpcons
