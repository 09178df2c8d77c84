#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fpcons {

/// Small dense row-major real matrix (used for the 12x12 flux Jacobian).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double frobenius_norm() const;
  double max_abs() const;
  double trace() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Eigenvalues with matching right eigenvectors (unit 2-norm).
struct GeneralEigen {
  std::vector<Complex> values;
  std::vector<ComplexVector> vectors;
};

/// Hessenberg reduction followed by Francis double-shift QR; eigenvectors from the
/// null space of (M - λI) for each cluster of (nearly) equal eigenvalues.
/// Throws ConvergenceFailure when the iteration budget (30 per eigenvalue) runs out.
GeneralEigen eig_general(const Matrix& m);

/// Eigenvalues only.
std::vector<Complex> eigenvalues_general(const Matrix& m);

/// Thin singular value decomposition A = U diag(s) V^T via one-sided Jacobi.
/// Requires rows >= cols. Singular values are sorted descending.
struct Svd {
  std::vector<double> values;
  Matrix u;  // rows x cols
  Matrix v;  // cols x cols
};

Svd svd(const Matrix& a);
std::vector<double> singular_values(const Matrix& a);

/// Number of singular values above rel_tol * largest.
std::size_t numerical_rank(const std::vector<double>& singular_values, double rel_tol);

/// Smallest singular value of the matrix whose columns are the given complex vectors
/// (computed through the real embedding [Re -Im; Im Re]).
double min_singular_value(const std::vector<ComplexVector>& columns);

}  // namespace fpcons
