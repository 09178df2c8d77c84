#include "fpcons/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpcons/errors.hpp"

namespace fpcons {

namespace {

double kronecker(std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; }

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NonFinite(std::string(what) + ": non-finite value");
}

Ten2 stress_of(const StoredEnergy& se, const Ten2& F) { return se.stress ? se.stress(F) : fd_stress(se, F); }

ElasticityMap elasticity_of(const StoredEnergy& se) {
  if (se.elasticity) return se.elasticity;
  return [se](const Ten2& F) { return major_symmetrized(fd_elasticity_tensor(se, F)); };
}

}  // namespace

MassDensityTensor MassDensityTensor::from_velocity_coefficient(const Ten2& V) {
  if (asymmetry(V) > Tolerances::sym * std::max(1.0, max_abs(V))) {
    throw NotSymmetric("mass density: velocity coefficient V is not symmetric");
  }
  if (std::abs(det(V)) <= 1e-12) throw Singular("mass density: V is singular");
  Ten2 M = sym(inverse(V));
  return {M, V};
}

bool MassDensityTensor::positive_definite() const { return eig_sym(M).values[2] > 0.0; }

double step_F(const Ten2& F) { return 1e-5 * std::max(1.0, norm(F)); }
double step_p(const Vec3& p) { return 1e-5 * std::max(1.0, norm(p)); }

StoredEnergy linear_isotropic(const LameParameters& lame) {
  const double lam = lame.lambda;
  const double mu = lame.mu;
  StoredEnergy se;
  se.name = "linear_isotropic";
  se.parameters = {{"lambda", lam}, {"mu", mu}};
  se.sigma = [lam, mu](const Ten2& F) {
    const Ten2 eps = sym(F) - Ten2::identity();
    const double tr = trace(eps);
    return 0.5 * lam * tr * tr + mu * ddot(eps, eps);
  };
  se.stress = [lam, mu](const Ten2& F) {
    const Ten2 eps = sym(F) - Ten2::identity();
    return lam * trace(eps) * Ten2::identity() + 2.0 * mu * eps;
  };
  se.elasticity = [lam, mu](const Ten2&) {
    Ten4 s;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t h = 0; h < 3; ++h)
          for (std::size_t k = 0; k < 3; ++k)
            s(i, j, h, k) = lam * kronecker(i, j) * kronecker(h, k) +
                            mu * (kronecker(i, h) * kronecker(j, k) + kronecker(i, k) * kronecker(j, h));
    return s;
  };
  return se;
}

StoredEnergy st_venant_kirchhoff(const LameParameters& lame) {
  const double lam = lame.lambda;
  const double mu = lame.mu;
  auto green = [](const Ten2& F) { return 0.5 * (transpose(F) * F - Ten2::identity()); };
  auto second_pk = [lam, mu, green](const Ten2& F) {
    const Ten2 E = green(F);
    return lam * trace(E) * Ten2::identity() + 2.0 * mu * E;
  };
  StoredEnergy se;
  se.name = "st_venant_kirchhoff";
  se.parameters = {{"lambda", lam}, {"mu", mu}};
  se.sigma = [lam, mu, green](const Ten2& F) {
    const Ten2 E = green(F);
    const double tr = trace(E);
    return 0.5 * lam * tr * tr + mu * ddot(E, E);
  };
  se.stress = [second_pk](const Ten2& F) { return F * second_pk(F); };
  se.elasticity = [lam, mu, second_pk](const Ten2& F) {
    const Ten2 T = second_pk(F);
    const Ten2 FFt = F * transpose(F);
    Ten4 s;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t h = 0; h < 3; ++h)
          for (std::size_t k = 0; k < 3; ++k)
            s(i, j, h, k) = kronecker(i, h) * T(k, j) + lam * F(i, j) * F(h, k) +
                            mu * (FFt(i, h) * kronecker(j, k) + F(i, k) * F(h, j));
    return s;
  };
  return se;
}

StoredEnergy neo_hookean(const LameParameters& lame) {
  const double lam = lame.lambda;
  const double mu = lame.mu;
  auto log_det = [](const Ten2& F) {
    const double J = det(F);
    if (!(J > 0.0)) throw DomainError("neo_hookean: det F must be positive");
    return std::log(J);
  };
  StoredEnergy se;
  se.name = "neo_hookean";
  se.parameters = {{"lambda", lam}, {"mu", mu}};
  se.sigma = [lam, mu, log_det](const Ten2& F) {
    const double lj = log_det(F);
    return 0.5 * mu * (ddot(F, F) - 3.0) - mu * lj + 0.5 * lam * lj * lj;
  };
  se.stress = [lam, mu, log_det](const Ten2& F) {
    const double lj = log_det(F);
    return mu * F + (lam * lj - mu) * transpose(inverse(F));
  };
  se.elasticity = [lam, mu, log_det](const Ten2& F) {
    const double lj = log_det(F);
    const Ten2 G = transpose(inverse(F));
    Ten4 s;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t h = 0; h < 3; ++h)
          for (std::size_t k = 0; k < 3; ++k)
            s(i, j, h, k) = mu * kronecker(i, h) * kronecker(j, k) + lam * G(h, k) * G(i, j) -
                            (lam * lj - mu) * G(i, k) * G(h, j);
    return s;
  };
  return se;
}

std::vector<StoredEnergy> stored_energy_registry(const LameParameters& lame) {
  return {linear_isotropic(lame), st_venant_kirchhoff(lame), neo_hookean(lame)};
}

std::vector<std::string> stored_energy_names() {
  return {"linear_isotropic", "st_venant_kirchhoff", "neo_hookean"};
}

StoredEnergy find_stored_energy(const std::string& name, const LameParameters& lame) {
  for (StoredEnergy& se : stored_energy_registry(lame))
    if (se.name == name) return se;
  throw std::out_of_range("unknown stored energy: " + name);
}

Ten2 fd_stress(const StoredEnergy& se, const Ten2& F) {
  const double h = step_F(F);
  Ten2 out;
  for (std::size_t n = 0; n < 9; ++n) {
    Ten2 plus = F, minus = F;
    plus.c[n] += h;
    minus.c[n] -= h;
    const double sp = se.sigma(plus);
    const double sm = se.sigma(minus);
    require_finite(sp, "fd_stress");
    require_finite(sm, "fd_stress");
    out.c[n] = (sp - sm) / (2.0 * h);
  }
  return out;
}

Ten4 fd_elasticity_tensor(const StoredEnergy& se, const Ten2& F) {
  const double h = step_F(F);
  Ten4 out;
  for (std::size_t hk = 0; hk < 9; ++hk) {
    Ten2 plus = F, minus = F;
    plus.c[hk] += h;
    minus.c[hk] -= h;
    const Ten2 sp = stress_of(se, plus);
    const Ten2 sm = stress_of(se, minus);
    if (!is_finite(sp) || !is_finite(sm)) throw NonFinite("fd_elasticity_tensor: non-finite stress");
    for (std::size_t ij = 0; ij < 9; ++ij) out.c[9 * ij + hk] = (sp.c[ij] - sm.c[ij]) / (2.0 * h);
  }
  return out;
}

ConstitutiveModel tensor_mass_model(const Ten2& V, const StoredEnergy& se) {
  // validates symmetry and invertibility
  (void)MassDensityTensor::from_velocity_coefficient(V);
  ConstitutiveModel m;
  m.name = "tensor_mass/" + se.name;
  auto sigma = se.sigma;
  m.energy = [V, sigma](const State& s) { return 0.5 * dot(s.p, V * s.p) + sigma(s.F); };
  m.velocity = [V](const State& s) { return V * s.p; };
  m.stress = [se](const State& s) { return stress_of(se, s.F); };
  m.elasticity = elasticity_of(se);
  return m;
}

ConstitutiveModel classical_model(double rho, const StoredEnergy& se) {
  if (!(rho > 0.0)) throw DomainError("classical_model: rho must be positive");
  ConstitutiveModel m;
  m.name = "classical/" + se.name;
  auto sigma = se.sigma;
  m.energy = [rho, sigma](const State& s) { return dot(s.p, s.p) / (2.0 * rho) + sigma(s.F); };
  m.velocity = [rho](const State& s) { return s.p / rho; };
  m.stress = [se](const State& s) { return stress_of(se, s.F); };
  m.elasticity = elasticity_of(se);
  return m;
}

namespace fd {

Ten2 velocity_momentum_jacobian(const ConstitutiveModel& model, const State& s) {
  const double h = step_p(s.p);
  Ten2 N;
  for (std::size_t k = 0; k < 3; ++k) {
    State plus = s, minus = s;
    plus.p[k] += h;
    minus.p[k] -= h;
    const Vec3 d = (model.velocity(plus) - model.velocity(minus)) / (2.0 * h);
    for (std::size_t i = 0; i < 3; ++i) N(i, k) = d[i];
  }
  if (!is_finite(N)) throw NonFinite("velocity jacobian: non-finite value");
  return N;
}

Vec3 energy_momentum_gradient(const ConstitutiveModel& model, const State& s) {
  const double h = step_p(s.p);
  Vec3 g;
  for (std::size_t k = 0; k < 3; ++k) {
    State plus = s, minus = s;
    plus.p[k] += h;
    minus.p[k] -= h;
    g[k] = (model.energy(plus) - model.energy(minus)) / (2.0 * h);
  }
  if (!is_finite(g)) throw NonFinite("energy gradient: non-finite value");
  return g;
}

Ten2 energy_F_gradient(const ConstitutiveModel& model, const State& s) {
  const double h = step_F(s.F);
  Ten2 g;
  for (std::size_t n = 0; n < 9; ++n) {
    State plus = s, minus = s;
    plus.F.c[n] += h;
    minus.F.c[n] -= h;
    g.c[n] = (model.energy(plus) - model.energy(minus)) / (2.0 * h);
  }
  if (!is_finite(g)) throw NonFinite("energy gradient: non-finite value");
  return g;
}

Ten4 stress_F_jacobian(const ConstitutiveModel& model, const State& s) {
  const double h = step_F(s.F);
  Ten4 out;
  for (std::size_t hk = 0; hk < 9; ++hk) {
    State plus = s, minus = s;
    plus.F.c[hk] += h;
    minus.F.c[hk] -= h;
    const Ten2 d = (model.stress(plus) - model.stress(minus)) / (2.0 * h);
    for (std::size_t ij = 0; ij < 9; ++ij) out.c[9 * ij + hk] = d.c[ij];
  }
  if (!is_finite(out)) throw NonFinite("stress jacobian: non-finite value");
  return out;
}

}  // namespace fd

Ten4 elasticity_tensor(const ConstitutiveModel& model, const State& s) {
  if (model.elasticity) return model.elasticity(s.F);
  return major_symmetrized(fd::stress_F_jacobian(model, s));
}

Vec3 momentum_from_velocity(const ConstitutiveModel& model, const Ten2& F, const Vec3& v,
                            std::optional<Vec3> seed, const NewtonOptions& opts) {
  State s{F, seed.value_or(v)};
  Vec3 r = model.velocity(s) - v;
  double rn = norm(r);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (!std::isfinite(rn)) break;
    if (rn <= opts.tol) return s.p;
    const Ten2 N = fd::velocity_momentum_jacobian(model, s);
    Ten2 Ninv;
    try {
      Ninv = inverse(N);
    } catch (const Singular&) {
      throw NewtonDivergence("momentum_from_velocity: singular velocity jacobian");
    }
    const Vec3 step = -(Ninv * r);
    double alpha = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      State trial{F, s.p + alpha * step};
      const Vec3 rt = model.velocity(trial) - v;
      const double rtn = norm(rt);
      if (std::isfinite(rtn) && rtn < rn) {
        s = trial;
        r = rt;
        rn = rtn;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  if (std::isfinite(rn) && rn <= opts.tol) return s.p;
  throw NewtonDivergence("momentum_from_velocity: residual not reduced below tolerance");
}

}  // namespace fpcons
