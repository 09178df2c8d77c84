#pragma once

#include <array>
#include <cstddef>

namespace fpcons {

/// Tolerances shared by the tensor kernels and the checks built on them.
struct Tolerances {
  static constexpr double sym = 1e-9;  ///< allowed |M_ij - M_ji| (scaled by max(1, |M|))
  static constexpr double eig = 1e-9;  ///< relative eigen-residual
};

/// Vector of a three-dimensional inner-product space.
struct Vec3 {
  std::array<double, 3> c{};

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  static constexpr Vec3 zero() { return {}; }
  static constexpr Vec3 basis(std::size_t i) {
    Vec3 e;
    e.c[i] = 1.0;
    return e;
  }

  Vec3& operator+=(const Vec3& o);
  Vec3& operator-=(const Vec3& o);
  Vec3& operator*=(double s);
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

Vec3 operator+(Vec3 a, const Vec3& b);
Vec3 operator-(Vec3 a, const Vec3& b);
Vec3 operator-(Vec3 a);
Vec3 operator*(double s, Vec3 a);
Vec3 operator*(Vec3 a, double s);
Vec3 operator/(Vec3 a, double s);
double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
double max_abs(const Vec3& a);
Vec3 normalized(const Vec3& a);
bool is_finite(const Vec3& a);

/// Second-order tensor (linear map of the 3-space), stored row-major.
struct Ten2 {
  std::array<double, 9> c{};

  constexpr double& operator()(std::size_t i, std::size_t j) { return c[3 * i + j]; }
  constexpr double operator()(std::size_t i, std::size_t j) const { return c[3 * i + j]; }

  static constexpr Ten2 zero() { return {}; }
  static constexpr Ten2 identity() {
    Ten2 t;
    t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
    return t;
  }
  static constexpr Ten2 diag(double a, double b, double c) {
    Ten2 t;
    t(0, 0) = a;
    t(1, 1) = b;
    t(2, 2) = c;
    return t;
  }

  Ten2& operator+=(const Ten2& o);
  Ten2& operator-=(const Ten2& o);
  Ten2& operator*=(double s);
  friend bool operator==(const Ten2&, const Ten2&) = default;
};

Ten2 operator+(Ten2 a, const Ten2& b);
Ten2 operator-(Ten2 a, const Ten2& b);
Ten2 operator-(Ten2 a);
Ten2 operator*(double s, Ten2 a);
Ten2 operator*(Ten2 a, double s);
Ten2 operator/(Ten2 a, double s);
Ten2 operator*(const Ten2& a, const Ten2& b);
Vec3 operator*(const Ten2& a, const Vec3& v);

Ten2 transpose(const Ten2& a);
Ten2 sym(const Ten2& a);
double trace(const Ten2& a);
double det(const Ten2& a);
/// Throws Singular when |det a| <= 1e-300 relative to the entry scale.
Ten2 inverse(const Ten2& a);
/// Frobenius inner product A·B = sum A_ij B_ij.
double ddot(const Ten2& a, const Ten2& b);
double norm(const Ten2& a);
double max_abs(const Ten2& a);
Vec3 column(const Ten2& a, std::size_t j);
Vec3 row(const Ten2& a, std::size_t i);
bool is_finite(const Ten2& a);
/// max |A_ij - A_ji|.
double asymmetry(const Ten2& a);

/// The dyad a⊗b with (a⊗b)_ij = a_i b_j, so that (a⊗b)u = (b·u) a.
Ten2 outer(const Vec3& a, const Vec3& b);

/// Fourth-order tensor; S(i,j,h,k) acts on Ten2 as (S[Z])_ij = sum_hk S_ijhk Z_hk.
struct Ten4 {
  std::array<double, 81> c{};

  constexpr double& operator()(std::size_t i, std::size_t j, std::size_t h, std::size_t k) {
    return c[27 * i + 9 * j + 3 * h + k];
  }
  constexpr double operator()(std::size_t i, std::size_t j, std::size_t h, std::size_t k) const {
    return c[27 * i + 9 * j + 3 * h + k];
  }

  static constexpr Ten4 zero() { return {}; }
  /// Identity on Ten2: I_ijhk = δ_ih δ_jk.
  static Ten4 identity();

  Ten4& operator+=(const Ten4& o);
  Ten4& operator-=(const Ten4& o);
  Ten4& operator*=(double s);
};

Ten4 operator+(Ten4 a, const Ten4& b);
Ten4 operator-(Ten4 a, const Ten4& b);
Ten4 operator*(double s, Ten4 a);

Ten2 apply4(const Ten4& s, const Ten2& z);
/// max |S_ijhk - S_hkij|.
double major_asymmetry(const Ten4& s);
/// (S + S^T)/2 with respect to the pair swap (ij) <-> (hk).
Ten4 major_symmetrized(const Ten4& s);
double max_abs(const Ten4& s);
bool is_finite(const Ten4& s);

/// Eigenpairs of a symmetric tensor, eigenvalues in descending order.
struct SymEigen {
  std::array<double, 3> values{};
  std::array<Vec3, 3> vectors{};
};

/// Cyclic Jacobi. Throws NotSymmetric when asymmetry exceeds Tolerances::sym.
SymEigen eig_sym(const Ten2& m);

}  // namespace fpcons
