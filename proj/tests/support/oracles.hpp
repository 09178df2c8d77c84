#pragma once

// Independent reference computations used as test oracles. Nothing here calls
// into the library beyond its value types.

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "fpcons/tensor.hpp"

namespace oracle {

using fpcons::Ten2;
using fpcons::Ten4;
using fpcons::Vec3;

inline double kd(int i, int j) { return i == j ? 1.0 : 0.0; }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Vec3 vec(double lo = -1.0, double hi = 1.0) { return {{uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}}; }
  Vec3 unit() {
    for (;;) {
      Vec3 v = vec();
      double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      if (n > 0.1 && n <= 1.0) return {{v[0] / n, v[1] / n, v[2] / n}};
    }
  }
  Ten2 ten2(double lo = -1.0, double hi = 1.0) {
    Ten2 t;
    for (double& e : t.c) e = uniform(lo, hi);
    return t;
  }
  Ten2 symmetric() {
    Ten2 t = ten2();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < i; ++j) t(i, j) = t(j, i);
    return t;
  }
  // F = 1 + 0.5 R with det F in [dmin, dmax].
  Ten2 deformation(double dmin = 0.5, double dmax = 2.0) {
    for (;;) {
      Ten2 F = ten2();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) F(i, j) = kd(i, j) + 0.5 * F(i, j);
      double d = det3(F);
      if (d >= dmin && d <= dmax) return F;
    }
  }
  // Symmetric V = Q diag(e) Q^T with eigenvalues in [lo, hi].
  Ten2 spd(double lo, double hi) {
    std::array<Vec3, 3> q{unit(), {}, {}};
    Vec3 t = unit();
    q[1] = normalize(sub(t, scale(dot3(t, q[0]), q[0])));
    q[2] = cross(q[0], q[1]);
    std::array<double, 3> e{uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
    Ten2 V;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) V(i, j) += e[k] * q[k][i] * q[k][j];
    return V;
  }
  std::mt19937_64& engine() { return gen_; }

  static double det3(const Ten2& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }

 private:
  static double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
  static Vec3 scale(double s, const Vec3& a) { return {{s * a[0], s * a[1], s * a[2]}}; }
  static Vec3 sub(const Vec3& a, const Vec3& b) { return {{a[0] - b[0], a[1] - b[1], a[2] - b[2]}}; }
  static Vec3 normalize(const Vec3& a) { return scale(1.0 / std::sqrt(dot3(a, a)), a); }
  static Vec3 cross(const Vec3& a, const Vec3& b) {
    return {{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
  }
  std::mt19937_64 gen_;
};

// Isotropic linear elasticity: λ δij δhk + μ (δih δjk + δik δjh).
inline Ten4 isotropic_elasticity(double lambda, double mu) {
  Ten4 s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int h = 0; h < 3; ++h)
        for (int k = 0; k < 3; ++k)
          s(i, j, h, k) = lambda * kd(i, j) * kd(h, k) + mu * (kd(i, h) * kd(j, k) + kd(i, k) * kd(j, h));
  return s;
}

// E_ih = Σ_jk S_ijhk w_j w_k by explicit loops.
inline Ten2 acoustic_loops(const Ten4& s, const Vec3& w) {
  Ten2 e;
  for (int i = 0; i < 3; ++i)
    for (int h = 0; h < 3; ++h)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) e(i, h) += s(i, j, h, k) * w[j] * w[k];
  return e;
}

// Isotropic acoustic tensor (λ+μ) w⊗w + μ 1.
inline Ten2 isotropic_acoustic(double lambda, double mu, const Vec3& w) {
  Ten2 e;
  for (int i = 0; i < 3; ++i)
    for (int h = 0; h < 3; ++h) e(i, h) = (lambda + mu) * w[i] * w[h] + mu * kd(i, h);
  return e;
}

// St. Venant-Kirchhoff at F = s·1: the acoustic tensor is t·1 + s²(μ1 + (λ+μ) w⊗w) with
// t = (3λ/2 + μ)(s² - 1); transverse and longitudinal eigenvalues below.
inline double svk_uniform_transverse(double s, double lambda, double mu) {
  return (1.5 * lambda + mu) * (s * s - 1.0) + mu * s * s;
}
inline double svk_uniform_longitudinal(double s, double lambda, double mu) {
  return (1.5 * lambda + mu) * (s * s - 1.0) + (lambda + 2.0 * mu) * s * s;
}

// Energies written directly from their textbook definitions.
inline double linear_isotropic_energy(const Ten2& F, double lambda, double mu) {
  double tr = 0.0, ee = 0.0;
  for (int i = 0; i < 3; ++i) tr += F(i, i) - 1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double eps = 0.5 * (F(i, j) + F(j, i)) - kd(i, j);
      ee += eps * eps;
    }
  return 0.5 * lambda * tr * tr + mu * ee;
}

inline double svk_energy(const Ten2& F, double lambda, double mu) {
  double E[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double c = 0.0;
      for (int k = 0; k < 3; ++k) c += F(k, i) * F(k, j);
      E[i][j] = 0.5 * (c - kd(i, j));
    }
  double tr = E[0][0] + E[1][1] + E[2][2], ee = 0.0;
  for (auto& r : E)
    for (double e : r) ee += e * e;
  return 0.5 * lambda * tr * tr + mu * ee;
}

inline double neo_hookean_energy(const Ten2& F, double lambda, double mu) {
  double ff = 0.0;
  for (double e : F.c) ff += e * e;
  double lj = std::log(Rng::det3(F));
  return 0.5 * mu * (ff - 3.0) - mu * lj + 0.5 * lambda * lj * lj;
}

// Fourth-order central difference gradient of a scalar function of Ten2.
inline Ten2 gradient(const std::function<double(const Ten2&)>& f, const Ten2& F, double h = 1e-4) {
  Ten2 g;
  for (int n = 0; n < 9; ++n) {
    auto at = [&](double d) {
      Ten2 G = F;
      G.c[n] += d;
      return f(G);
    };
    g.c[n] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  }
  return g;
}

}  // namespace oracle
