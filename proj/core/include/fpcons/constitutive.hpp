#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpcons/tensor.hpp"

namespace fpcons {

/// Point state: deformation gradient F and referential momentum density p.
struct State {
  Ten2 F = Ten2::identity();
  Vec3 p{};
};

using EnergyMap = std::function<double(const State&)>;
using VelocityMap = std::function<Vec3(const State&)>;
using StressMap = std::function<Ten2(const State&)>;
using ElasticityMap = std::function<Ten4(const Ten2&)>;

/// Black-box constitutive triple: total energy, velocity and Piola stress as
/// functions of (F, p). `elasticity` is the analytic dS/dF when known.
struct ConstitutiveModel {
  std::string name;
  EnergyMap energy;
  VelocityMap velocity;
  StressMap stress;
  ElasticityMap elasticity;  // may be empty
};

/// Stored energy sigma(F) with optional analytic first and second derivatives.
struct StoredEnergy {
  std::string name;
  std::function<double(const Ten2&)> sigma;
  std::function<Ten2(const Ten2&)> stress;  // dsigma/dF, may be empty
  ElasticityMap elasticity;                 // d2sigma/dF2, may be empty
  std::map<std::string, double> parameters;
};

/// Mass-density tensor M and its inverse V (the velocity coefficient, v = V p).
struct MassDensityTensor {
  Ten2 M;
  Ten2 V;

  /// Throws NotSymmetric or Singular.
  static MassDensityTensor from_velocity_coefficient(const Ten2& V);
  bool positive_definite() const;
};

/// Finite-difference step sizes.
double step_F(const Ten2& F);
double step_p(const Vec3& p);

struct LameParameters {
  double lambda = 2.0;
  double mu = 1.0;
};

/// sigma = λ/2 (tr ε)^2 + μ ε·ε, ε = sym(F) - 1.
StoredEnergy linear_isotropic(const LameParameters& lame);
/// sigma = λ/2 (tr E)^2 + μ E·E, E = (F^T F - 1)/2.
StoredEnergy st_venant_kirchhoff(const LameParameters& lame);
/// sigma = μ/2 (F·F - 3) - μ ln J + λ/2 (ln J)^2, J = det F. Throws DomainError for J <= 0.
StoredEnergy neo_hookean(const LameParameters& lame);

std::vector<StoredEnergy> stored_energy_registry(const LameParameters& lame = {});
/// Throws std::out_of_range for an unknown name.
StoredEnergy find_stored_energy(const std::string& name, const LameParameters& lame = {});
std::vector<std::string> stored_energy_names();

/// Central differences of sigma, step step_F(F). Throws NonFinite.
Ten2 fd_stress(const StoredEnergy& se, const Ten2& F);
/// Central differences of the stress map (analytic when available, otherwise fd_stress).
Ten4 fd_elasticity_tensor(const StoredEnergy& se, const Ten2& F);

/// Energy |p|^2/(2ρ) + sigma(F), velocity p/ρ, stress dsigma/dF.
ConstitutiveModel classical_model(double rho, const StoredEnergy& se);
/// Energy p·Vp/2 + sigma(F), velocity Vp, stress dsigma/dF. Throws NotSymmetric, Singular.
ConstitutiveModel tensor_mass_model(const Ten2& V, const StoredEnergy& se);

/// Derivatives of a black-box model by central differences.
namespace fd {
/// N_ih = d v_i / d p_h.
Ten2 velocity_momentum_jacobian(const ConstitutiveModel& model, const State& s);
/// d energy / dp and d energy / dF.
Vec3 energy_momentum_gradient(const ConstitutiveModel& model, const State& s);
Ten2 energy_F_gradient(const ConstitutiveModel& model, const State& s);
/// S4_ijhk = d S_ij / d F_hk at fixed p.
Ten4 stress_F_jacobian(const ConstitutiveModel& model, const State& s);
}  // namespace fd

/// Elasticity tensor dS/dF at fixed p: analytic when the model carries one, else
/// finite differences projected onto major symmetry.
Ten4 elasticity_tensor(const ConstitutiveModel& model, const State& s);

struct NewtonOptions {
  int max_iter = 50;
  double tol = 1e-10;
};

/// Inverts p -> velocity(F, p) = v by damped Newton with a finite-difference
/// Jacobian. `seed` defaults to v. Throws NewtonDivergence.
Vec3 momentum_from_velocity(const ConstitutiveModel& model, const Ten2& F, const Vec3& v,
                            std::optional<Vec3> seed = std::nullopt, const NewtonOptions& opts = {});

}  // namespace fpcons
