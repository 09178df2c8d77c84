#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "fpcons/dense.hpp"
#include "fpcons/tensor.hpp"

namespace fpcons {

/// E(w) with E_ih = S_ijhk w_j w_k, i.e. E(w)u = (S[u⊗w])w, and its eigenpairs.
struct AcousticTensor {
  Vec3 w;
  Ten2 E;
  std::array<double, 3> eigenvalues{};  // descending
  std::array<Vec3, 3> eigenvectors{};
};

/// Throws NotUnit when | |w| - 1 | > 1e-12.
AcousticTensor acoustic_tensor(const Ten4& S4, const Vec3& w);

/// Direction-contracted flux Jacobian of (F, p) for v = p/ρ, acting on the
/// block vector (Z c_1, Z c_2, Z c_3, z): rows/cols 3α..3α+2 hold Z c_α, 9..11 hold z.
struct BlockMatrix12 {
  Matrix entries{12, 12};
  Vec3 w;
  double rho = 1.0;
};

/// Throws NotUnit, DomainError (rho <= 0).
BlockMatrix12 assemble_M(const Ten4& S4, double rho, const Vec3& w);

struct EigenPair {
  Complex value;
  ComplexVector vector;
};

struct Eigenstructure {
  std::vector<Complex> eigenvalues;
  std::vector<double> singular_values;
  int zero_multiplicity = 0;          // 12 - rank(M), geometric
  std::vector<EigenPair> nonzero_pairs;
  int independent_count = 0;          // rank of the stacked nonzero eigenvectors
  double independence_sv = 0.0;       // smallest singular value of that stack
  double kernel_z_norm = 0.0;         // max |z-block| over the null-space basis
  double max_residual = 0.0;          // max |Mv - λv| / |M|
};

struct EigenstructureOptions {
  double zero_band = 1e-8;       // relative to the largest singular value
  double independence_tol = 1e-6;
};

/// Throws ConvergenceFailure.
Eigenstructure eigenstructure(const BlockMatrix12& M, const EigenstructureOptions& opts = {});

/// Max relative mismatch between the sorted sets {ρλ²} over the nonzero
/// eigenvalues and the eigenvalues of E(w) (each counted twice, for ±λ).
double wave_speed_mismatch(const Eigenstructure& es, const AcousticTensor& acoustic, double rho);

/// Fibonacci-sphere directions followed by the 26 axis/face/edge directions.
std::vector<Vec3> scan_direction_set(int n_dirs);

struct DirectionRecord {
  Vec3 w;
  std::array<double, 3> acoustic_eigenvalues{};
  double min_eigenvalue = 0.0;
  std::array<double, 3> wave_speeds{};  // sqrt(μ/ρ); NaN when μ < 0
  int zero_multiplicity = -1;           // -1 when the block analysis was skipped
  int independent_count = -1;
  double speed_mismatch = 0.0;          // NaN unless E(w) is positive definite
};

struct HyperbolicityReport {
  std::vector<DirectionRecord> records;
  double rho = 1.0;
  double min_eigenvalue = 0.0;
  Vec3 worst_direction;
  bool strongly_elliptic = false;
};

struct ScanOptions {
  int n_dirs = 256;
  double se_tol = 0.0;        // strongly elliptic iff min eigenvalue > se_tol
  bool block_analysis = true; // also assemble and analyse the 12x12 matrix per direction
};

/// Throws DomainError for n_dirs < 1.
HyperbolicityReport scan_directions(const std::function<Ten4(const Ten2&)>& S4_at, const Ten2& F, double rho,
                                    const ScanOptions& opts = {});

/// CSV: one row per direction.
void write_csv(std::ostream& os, const HyperbolicityReport& report);

/// Minimum acoustic eigenvalue over the scan directions.
double min_acoustic_eigenvalue(const Ten4& S4, int n_dirs = 256);

/// Bisection on s in [lo, hi] for a sign change of f(s); f(lo) and f(hi) must
/// have opposite signs. Returns the bracket midpoint after `iterations` halvings.
double bisect_sign_change(const std::function<double(double)>& f, double lo, double hi, int iterations = 60);

}  // namespace fpcons
