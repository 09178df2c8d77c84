#include "fpcons/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "fpcons/errors.hpp"

namespace fpcons {

namespace {

void require_unit(const Vec3& w, const char* who) {
  if (!(std::abs(norm(w) - 1.0) <= 1e-12)) throw NotUnit(std::string(who) + ": direction must be a unit vector");
}

}  // namespace

AcousticTensor acoustic_tensor(const Ten4& S4, const Vec3& w) {
  require_unit(w, "acoustic_tensor");
  AcousticTensor out;
  out.w = w;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t h = 0; h < 3; ++h) {
      double acc = 0.0;
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) acc += S4(i, j, h, k) * w[j] * w[k];
      out.E(i, h) = acc;
    }
  const SymEigen eig = eig_sym(out.E);
  out.eigenvalues = eig.values;
  out.eigenvectors = eig.vectors;
  return out;
}

BlockMatrix12 assemble_M(const Ten4& S4, double rho, const Vec3& w) {
  require_unit(w, "assemble_M");
  if (!(rho > 0.0)) throw DomainError("assemble_M: rho must be positive");
  BlockMatrix12 M;
  M.w = w;
  M.rho = rho;
  for (std::size_t alpha = 0; alpha < 3; ++alpha) {
    // M_{α4} z = -ρ^{-1} w_α z
    for (std::size_t i = 0; i < 3; ++i) M.entries(3 * alpha + i, 9 + i) = -w[alpha] / rho;
    // M_{4α} u = -(S[u⊗c_α]) w
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t h = 0; h < 3; ++h) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 3; ++j) acc += S4(i, j, h, alpha) * w[j];
        M.entries(9 + i, 3 * alpha + h) = -acc;
      }
  }
  return M;
}

Eigenstructure eigenstructure(const BlockMatrix12& block, const EigenstructureOptions& opts) {
  const Matrix& M = block.entries;
  const std::size_t n = M.rows();
  Eigenstructure es;

  const Svd d = svd(M);
  es.singular_values = d.values;
  const double top = d.values.empty() ? 0.0 : d.values.front();
  const std::size_t rank = numerical_rank(d.values, opts.zero_band);
  es.zero_multiplicity = static_cast<int>(n - rank);
  for (std::size_t c = rank; c < n; ++c) {
    double z2 = 0.0;
    for (std::size_t i = 9; i < 12; ++i) z2 += d.v(i, c) * d.v(i, c);
    es.kernel_z_norm = std::max(es.kernel_z_norm, std::sqrt(z2));
  }

  const GeneralEigen ge = eig_general(M);
  es.eigenvalues = ge.values;
  const double mnorm = std::max(M.frobenius_norm(), 1e-300);
  std::vector<ComplexVector> stack;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex lambda = ge.values[k];
    const ComplexVector& v = ge.vectors[k];
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex acc = -lambda * v[i];
      for (std::size_t j = 0; j < n; ++j) acc += M(i, j) * v[j];
      res += std::norm(acc);
    }
    es.max_residual = std::max(es.max_residual, std::sqrt(res) / mnorm);
    if (std::abs(lambda) > opts.zero_band * top) {
      es.nonzero_pairs.push_back({lambda, v});
      stack.push_back(v);
    }
  }
  std::sort(es.nonzero_pairs.begin(), es.nonzero_pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });

  if (!stack.empty()) {
    // real embedding doubles every singular value
    const std::size_t m = stack.front().size();
    const std::size_t k = stack.size();
    Matrix embed(2 * m, 2 * k);
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t i = 0; i < m; ++i) {
        embed(i, c) = stack[c][i].real();
        embed(i, k + c) = -stack[c][i].imag();
        embed(m + i, c) = stack[c][i].imag();
        embed(m + i, k + c) = stack[c][i].real();
      }
    const std::vector<double> s = singular_values(embed);
    es.independence_sv = *std::min_element(s.begin(), s.end());
    const auto above = std::count_if(s.begin(), s.end(), [&](double x) { return x > opts.independence_tol; });
    es.independent_count = static_cast<int>(above / 2);
  }
  return es;
}

double wave_speed_mismatch(const Eigenstructure& es, const AcousticTensor& acoustic, double rho) {
  if (es.nonzero_pairs.size() != 6) return std::numeric_limits<double>::infinity();
  std::vector<double> from_block;
  for (const EigenPair& pr : es.nonzero_pairs) {
    const Complex l2 = pr.value * pr.value;
    if (std::abs(l2.imag()) > 1e-8 * std::max(1.0, std::abs(l2))) return std::numeric_limits<double>::infinity();
    from_block.push_back(rho * l2.real());
  }
  std::vector<double> from_acoustic;
  for (double mu : acoustic.eigenvalues) {
    from_acoustic.push_back(mu);
    from_acoustic.push_back(mu);
  }
  std::sort(from_block.begin(), from_block.end());
  std::sort(from_acoustic.begin(), from_acoustic.end());
  double scale = 0.0;
  for (double mu : acoustic.eigenvalues) scale = std::max(scale, std::abs(mu));
  scale = std::max(scale, 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < 6; ++i) worst = std::max(worst, std::abs(from_block[i] - from_acoustic[i]) / scale);
  return worst;
}

std::vector<Vec3> scan_direction_set(int n_dirs) {
  if (n_dirs < 1) throw DomainError("scan_direction_set: n_dirs must be at least 1");
  std::vector<Vec3> dirs;
  dirs.reserve(std::size_t(n_dirs) + 26);
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n_dirs; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n_dirs;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    dirs.push_back(normalized(Vec3{{r * std::cos(phi), r * std::sin(phi), z}}));
  }
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        dirs.push_back(normalized(Vec3{{double(a), double(b), double(c)}}));
      }
  return dirs;
}

HyperbolicityReport scan_directions(const std::function<Ten4(const Ten2&)>& S4_at, const Ten2& F, double rho,
                                    const ScanOptions& opts) {
  if (opts.n_dirs < 1) throw DomainError("scan_directions: n_dirs must be at least 1");
  if (!(rho > 0.0)) throw DomainError("scan_directions: rho must be positive");
  const Ten4 S4 = S4_at(F);
  HyperbolicityReport report;
  report.rho = rho;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const Vec3& w : scan_direction_set(opts.n_dirs)) {
    const AcousticTensor at = acoustic_tensor(S4, w);
    DirectionRecord rec;
    rec.w = w;
    rec.acoustic_eigenvalues = at.eigenvalues;
    rec.min_eigenvalue = at.eigenvalues[2];
    for (std::size_t k = 0; k < 3; ++k) {
      const double mu = at.eigenvalues[k];
      rec.wave_speeds[k] = mu >= 0.0 ? std::sqrt(mu / rho) : std::numeric_limits<double>::quiet_NaN();
    }
    rec.speed_mismatch = std::numeric_limits<double>::quiet_NaN();
    if (opts.block_analysis) {
      const Eigenstructure es = eigenstructure(assemble_M(S4, rho, w));
      rec.zero_multiplicity = es.zero_multiplicity;
      rec.independent_count = es.independent_count;
      if (rec.min_eigenvalue > 0.0) rec.speed_mismatch = wave_speed_mismatch(es, at, rho);
    }
    if (rec.min_eigenvalue < report.min_eigenvalue) {
      report.min_eigenvalue = rec.min_eigenvalue;
      report.worst_direction = w;
    }
    report.records.push_back(rec);
  }
  report.strongly_elliptic = report.min_eigenvalue > opts.se_tol;
  return report;
}

void write_csv(std::ostream& os, const HyperbolicityReport& report) {
  os << "index,w1,w2,w3,mu1,mu2,mu3,speed1,speed2,speed3,zero_multiplicity,independent_count,speed_mismatch\n";
  os << std::scientific << std::setprecision(10);
  for (std::size_t n = 0; n < report.records.size(); ++n) {
    const DirectionRecord& r = report.records[n];
    os << n << ',' << r.w[0] << ',' << r.w[1] << ',' << r.w[2];
    for (double mu : r.acoustic_eigenvalues) os << ',' << mu;
    for (double c : r.wave_speeds) os << ',' << c;
    os << ',' << r.zero_multiplicity << ',' << r.independent_count << ',' << r.speed_mismatch << "\n";
  }
}

double min_acoustic_eigenvalue(const Ten4& S4, int n_dirs) {
  double m = std::numeric_limits<double>::infinity();
  for (const Vec3& w : scan_direction_set(n_dirs)) m = std::min(m, acoustic_tensor(S4, w).eigenvalues[2]);
  return m;
}

double bisect_sign_change(const std::function<double(double)>& f, double lo, double hi, int iterations) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo * fhi < 0.0)) throw DomainError("bisect_sign_change: no sign change on the bracket");
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace fpcons
