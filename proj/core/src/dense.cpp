#include "fpcons/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fpcons/errors.hpp"

namespace fpcons {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Matrix transpose(const Matrix& a) {
  Matrix r(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

namespace {

double sign_of(double magnitude, double s) { return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Householder reduction to upper Hessenberg form (similarity transform).
void reduce_to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    alpha = -sign_of(alpha, a(k + 1, k));
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    // A <- H A, H = I - 2 v v^T / (v^T v)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= 2.0 / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A H
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= 2.0 / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr layout).
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<Complex> hessenberg_qr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> wr(n, 0.0), wi(n, 0.0);
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  const int budget = 30 * std::max(n, 1);
  int total_its = 0;
  int nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        // Relative test, plus a norm-wise one so clusters of tiny eigenvalues deflate.
        if (std::abs(a(l, l - 1)) + s == s || std::abs(a(l, l - 1)) <= kEps * anorm) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (its == 30 || total_its >= budget) {
            throw ConvergenceFailure("eig_general: QR iteration budget exhausted");
          }
          if (its == 10 || its == 20) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          ++total_its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<Complex> out(n);
  for (int i = 0; i < n; ++i) out[i] = Complex(wr[i], wi[i]);
  return out;
}

// Solve (A - shift I) x = b in complex arithmetic with partial pivoting.
// Exactly singular pivots are nudged, as required by inverse iteration.
ComplexVector shifted_solve(const Matrix& a, Complex shift, ComplexVector b, double nudge) {
  const std::size_t n = a.rows();
  std::vector<ComplexVector> m(n, ComplexVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a(i, j) - (i == j ? shift : Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
    std::swap(m[k], m[piv]);
    std::swap(b[k], b[piv]);
    if (std::abs(m[k][k]) < nudge) m[k][k] = nudge;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = m[i][k] / m[k][k];
      if (f == Complex{}) continue;
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
      b[i] -= f * b[k];
    }
  }
  ComplexVector x(n);
  for (std::size_t i = n; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m[i][j] * x[j];
    x[i] = s / m[i][i];
  }
  return x;
}

double vector_norm(const ComplexVector& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

void normalize(ComplexVector& v) {
  const double n = vector_norm(v);
  if (n > 0.0)
    for (Complex& z : v) z /= n;
}

// Fixes the phase so the largest-magnitude component is real and positive.
void fix_phase(ComplexVector& v) {
  std::size_t big = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[big]) * (1.0 + 1e-12)) big = i;
  if (std::abs(v[big]) == 0.0) return;
  const Complex phase = std::abs(v[big]) / v[big];
  for (Complex& z : v) z *= phase;
}

// Inverse iteration for a complex eigenvalue; later members of a cluster are
// orthogonalized against earlier ones.
std::vector<ComplexVector> complex_cluster_vectors(const Matrix& a, Complex lambda, std::size_t count,
                                                   double scale) {
  const std::size_t n = a.rows();
  std::vector<ComplexVector> basis;
  for (std::size_t member = 0; member < count; ++member) {
    ComplexVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = Complex(1.0 + 0.1 * double((i + member) % n), 0.05 * double(i));
    for (int it = 0; it < 4; ++it) {
      x = shifted_solve(a, lambda, x, 1e-14 * scale);
      for (const ComplexVector& prev : basis) {
        Complex proj{};
        for (std::size_t i = 0; i < n; ++i) proj += std::conj(prev[i]) * x[i];
        for (std::size_t i = 0; i < n; ++i) x[i] -= proj * prev[i];
      }
      normalize(x);
    }
    fix_phase(x);
    basis.push_back(std::move(x));
  }
  return basis;
}

// Null space of (A - lambda I) from its smallest right singular vectors. When the
// geometric multiplicity is below `count` (defective eigenvalue) the null vectors are
// repeated, so the returned set is visibly dependent rather than padded with non-eigenvectors.
std::vector<ComplexVector> real_cluster_vectors(const Matrix& a, double lambda, std::size_t count, double scale) {
  const std::size_t n = a.rows();
  Matrix shifted = a;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda;
  const Svd d = svd(shifted);
  const double null_tol = 1.5e-8 * std::max(1.0, scale);
  std::size_t g = 0;
  while (g < count && d.values[n - 1 - g] <= null_tol) ++g;
  g = std::max<std::size_t>(g, 1);
  std::vector<ComplexVector> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t c = n - 1 - (k % g);
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = d.v(i, c);
    fix_phase(v);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::vector<Complex> eigenvalues_general(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("eig_general: matrix must be square");
  if (m.rows() == 0) return {};
  Matrix h = m;
  reduce_to_hessenberg(h);
  return hessenberg_qr(h);
}

GeneralEigen eig_general(const Matrix& m) {
  GeneralEigen out;
  out.values = eigenvalues_general(m);
  const std::size_t n = m.rows();
  out.vectors.assign(n, ComplexVector(n));
  if (n == 0) return out;

  const double scale = std::max(m.frobenius_norm(), 1e-300);
  const double cluster_tol = 1e-7 * std::max(1.0, scale);

  std::vector<bool> done(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> members;
    for (std::size_t j = i; j < n; ++j)
      if (!done[j] && std::abs(out.values[j] - out.values[i]) <= cluster_tol) members.push_back(j);
    Complex mean{};
    for (std::size_t j : members) mean += out.values[j];
    mean /= double(members.size());

    std::vector<ComplexVector> vecs;
    if (std::abs(mean.imag()) <= cluster_tol) {
      vecs = real_cluster_vectors(m, mean.real(), members.size(), scale);
    } else {
      vecs = complex_cluster_vectors(m, mean, members.size(), scale);
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
      out.vectors[members[k]] = std::move(vecs[k]);
      done[members[k]] = true;
    }
  }
  return out;
}

Svd svd(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw Error("svd: requires rows >= cols");
  Matrix u = a;
  Matrix v = Matrix::identity(n);
  constexpr double eps = 1e-15;

  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = sign_of(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double up = u(i, p);
          const double uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += u(i, j) * u(i, j);
    sv[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sv[x] > sv[y]; });

  Svd out{std::vector<double>(n), Matrix(m, n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values[c] = sv[src];
    for (std::size_t i = 0; i < m; ++i) out.u(i, c) = sv[src] > 0.0 ? u(i, src) / sv[src] : 0.0;
    for (std::size_t i = 0; i < n; ++i) out.v(i, c) = v(i, src);
  }
  return out;
}

std::vector<double> singular_values(const Matrix& a) {
  if (a.rows() >= a.cols()) return svd(a).values;
  return svd(transpose(a)).values;
}

std::size_t numerical_rank(const std::vector<double>& values, double rel_tol) {
  if (values.empty()) return 0;
  const double top = *std::max_element(values.begin(), values.end());
  if (top == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double s) { return s > rel_tol * top; }));
}

double min_singular_value(const std::vector<ComplexVector>& columns) {
  if (columns.empty()) return 0.0;
  const std::size_t n = columns.front().size();
  const std::size_t k = columns.size();
  Matrix embed(2 * n, 2 * k);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      const Complex z = columns[c][i];
      embed(i, c) = z.real();
      embed(i, k + c) = -z.imag();
      embed(n + i, c) = z.imag();
      embed(n + i, k + c) = z.real();
    }
  const std::vector<double> s = singular_values(embed);
  return *std::min_element(s.begin(), s.end());
}

}  // namespace fpcons
