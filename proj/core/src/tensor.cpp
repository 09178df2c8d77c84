#include "fpcons/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fpcons/errors.hpp"

namespace fpcons {

Vec3& Vec3::operator+=(const Vec3& o) {
  for (std::size_t i = 0; i < 3; ++i) c[i] += o.c[i];
  return *this;
}
Vec3& Vec3::operator-=(const Vec3& o) {
  for (std::size_t i = 0; i < 3; ++i) c[i] -= o.c[i];
  return *this;
}
Vec3& Vec3::operator*=(double s) {
  for (double& x : c) x *= s;
  return *this;
}

Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
Vec3 operator-(Vec3 a) { return a *= -1.0; }
Vec3 operator*(double s, Vec3 a) { return a *= s; }
Vec3 operator*(Vec3 a, double s) { return a *= s; }
Vec3 operator/(Vec3 a, double s) { return a *= 1.0 / s; }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
double max_abs(const Vec3& a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}
Vec3 normalized(const Vec3& a) { return a / norm(a); }
bool is_finite(const Vec3& a) {
  return std::all_of(a.c.begin(), a.c.end(), [](double x) { return std::isfinite(x); });
}

Ten2& Ten2::operator+=(const Ten2& o) {
  for (std::size_t i = 0; i < 9; ++i) c[i] += o.c[i];
  return *this;
}
Ten2& Ten2::operator-=(const Ten2& o) {
  for (std::size_t i = 0; i < 9; ++i) c[i] -= o.c[i];
  return *this;
}
Ten2& Ten2::operator*=(double s) {
  for (double& x : c) x *= s;
  return *this;
}

Ten2 operator+(Ten2 a, const Ten2& b) { return a += b; }
Ten2 operator-(Ten2 a, const Ten2& b) { return a -= b; }
Ten2 operator-(Ten2 a) { return a *= -1.0; }
Ten2 operator*(double s, Ten2 a) { return a *= s; }
Ten2 operator*(Ten2 a, double s) { return a *= s; }
Ten2 operator/(Ten2 a, double s) { return a *= 1.0 / s; }

Ten2 operator*(const Ten2& a, const Ten2& b) {
  Ten2 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}

Vec3 operator*(const Ten2& a, const Vec3& v) {
  Vec3 r;
  for (std::size_t i = 0; i < 3; ++i) r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
  return r;
}

Ten2 transpose(const Ten2& a) {
  Ten2 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

Ten2 sym(const Ten2& a) { return 0.5 * (a + transpose(a)); }

double trace(const Ten2& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

double det(const Ten2& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Ten2 inverse(const Ten2& a) {
  const double d = det(a);
  const double scale = std::max(max_abs(a), 1e-300);
  if (!std::isfinite(d) || std::abs(d) <= 1e-300 * scale * scale * scale) {
    throw Singular("inverse: tensor is singular");
  }
  Ten2 r;
  r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return r / d;
}

double ddot(const Ten2& a, const Ten2& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 9; ++i) s += a.c[i] * b.c[i];
  return s;
}

double norm(const Ten2& a) { return std::sqrt(ddot(a, a)); }

double max_abs(const Ten2& a) {
  double m = 0.0;
  for (double x : a.c) m = std::max(m, std::abs(x));
  return m;
}

Vec3 column(const Ten2& a, std::size_t j) { return {{a(0, j), a(1, j), a(2, j)}}; }
Vec3 row(const Ten2& a, std::size_t i) { return {{a(i, 0), a(i, 1), a(i, 2)}}; }

bool is_finite(const Ten2& a) {
  return std::all_of(a.c.begin(), a.c.end(), [](double x) { return std::isfinite(x); });
}

double asymmetry(const Ten2& a) {
  return std::max({std::abs(a(0, 1) - a(1, 0)), std::abs(a(0, 2) - a(2, 0)),
                   std::abs(a(1, 2) - a(2, 1))});
}

Ten2 outer(const Vec3& a, const Vec3& b) {
  Ten2 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

Ten4 Ten4::identity() {
  Ten4 t;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) t(i, j, i, j) = 1.0;
  return t;
}

Ten4& Ten4::operator+=(const Ten4& o) {
  for (std::size_t i = 0; i < 81; ++i) c[i] += o.c[i];
  return *this;
}
Ten4& Ten4::operator-=(const Ten4& o) {
  for (std::size_t i = 0; i < 81; ++i) c[i] -= o.c[i];
  return *this;
}
Ten4& Ten4::operator*=(double s) {
  for (double& x : c) x *= s;
  return *this;
}

Ten4 operator+(Ten4 a, const Ten4& b) { return a += b; }
Ten4 operator-(Ten4 a, const Ten4& b) { return a -= b; }
Ten4 operator*(double s, Ten4 a) { return a *= s; }

Ten2 apply4(const Ten4& s, const Ten2& z) {
  Ten2 r;
  for (std::size_t ij = 0; ij < 9; ++ij) {
    double acc = 0.0;
    for (std::size_t hk = 0; hk < 9; ++hk) acc += s.c[9 * ij + hk] * z.c[hk];
    r.c[ij] = acc;
  }
  return r;
}

double major_asymmetry(const Ten4& s) {
  double m = 0.0;
  for (std::size_t a = 0; a < 9; ++a)
    for (std::size_t b = a + 1; b < 9; ++b) m = std::max(m, std::abs(s.c[9 * a + b] - s.c[9 * b + a]));
  return m;
}

Ten4 major_symmetrized(const Ten4& s) {
  Ten4 r = s;
  for (std::size_t a = 0; a < 9; ++a)
    for (std::size_t b = a + 1; b < 9; ++b) {
      const double m = 0.5 * (s.c[9 * a + b] + s.c[9 * b + a]);
      r.c[9 * a + b] = r.c[9 * b + a] = m;
    }
  return r;
}

double max_abs(const Ten4& s) {
  double m = 0.0;
  for (double x : s.c) m = std::max(m, std::abs(x));
  return m;
}

bool is_finite(const Ten4& s) {
  return std::all_of(s.c.begin(), s.c.end(), [](double x) { return std::isfinite(x); });
}

SymEigen eig_sym(const Ten2& m) {
  const double scale = std::max(1.0, max_abs(m));
  if (asymmetry(m) > Tolerances::sym * scale) {
    throw NotSymmetric("eig_sym: input asymmetry exceeds tolerance");
  }
  Ten2 a = sym(m);
  Ten2 v = Ten2::identity();

  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    if (off <= 1e-40 * scale * scale) break;
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t q = p + 1; q < 3; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        // A <- J^T A J with the rotation in the (p,q) plane
        for (std::size_t k = 0; k < 3; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = cs * akp - sn * akq;
          a(k, q) = sn * akp + cs * akq;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = cs * apk - sn * aqk;
          a(q, k) = sn * apk + cs * aqk;
        }
        for (std::size_t k = 0; k < 3; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = cs * vkp - sn * vkq;
          v(k, q) = sn * vkp + cs * vkq;
        }
      }
    }
  }

  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymEigen out;
  for (std::size_t n = 0; n < 3; ++n) {
    out.values[n] = a(order[n], order[n]);
    out.vectors[n] = column(v, order[n]);
  }
  return out;
}

}  // namespace fpcons
