#include "gin/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gin/errors.hpp"

#include <lapacke.h>

namespace gin {
namespace {

// LAPACK's blocked QR iteration wins over Eigen's native solver above roughly
// this size; below it the call overhead dominates.
constexpr int kLapackThreshold = 64;

void solve_lapack(const ComplexMatrix& g, ComplexVector& w, ComplexMatrix& vr) {
  const int n = static_cast<int>(g.rows());
  ComplexMatrix a = g;  // zgeev overwrites its input
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'V', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, n,
      reinterpret_cast<lapack_complex_double*>(vr.data()), n);
  if (info != 0) throw NonConvergence("zgeev failed, info=" + std::to_string(info));
}

void solve_eigen(const ComplexMatrix& g, ComplexVector& w, ComplexMatrix& vr) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(g, true);
  if (es.info() != Eigen::Success) throw NonConvergence("complex eigensolver failed");
  w = es.eigenvalues();
  vr = es.eigenvectors();
}

}  // namespace

double operator_norm_estimate(const ComplexMatrix& g, int iters) {
  const int n = static_cast<int>(g.rows());
  if (n == 0) return 0.0;
  ComplexVector v = ComplexVector::Ones(n) / std::sqrt(static_cast<double>(n));
  double s = 0.0;
  for (int k = 0; k < iters; ++k) {
    ComplexVector u = g * v;
    v = g.adjoint() * u;
    s = std::sqrt(v.norm());
    if (s == 0.0) return 0.0;
    v /= v.norm();
  }
  return s;
}

std::pair<Spectrum, EigenSystem> eigendecompose(const ComplexMatrix& g, double gap_floor) {
  const int n = static_cast<int>(g.rows());
  if (n < 1 || g.cols() != n) throw ConfigInvalid("eigendecompose needs a square matrix");
  if (!g.allFinite()) throw ConfigInvalid("eigendecompose needs finite entries");

  ComplexVector w(n);
  ComplexMatrix x(n, n);
  if (n >= kLapackThreshold)
    solve_lapack(g, w, x);
  else
    solve_eigen(g, w, x);

  // Lexicographic (Re, Im) order for reproducibility across backends.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int i, int j) {
    if (w(i).real() != w(j).real()) return w(i).real() < w(j).real();
    return w(i).imag() < w(j).imag();
  });
  Spectrum spec;
  spec.eigenvalues.resize(static_cast<std::size_t>(n));
  ComplexMatrix xs(n, n);
  for (int k = 0; k < n; ++k) {
    spec.eigenvalues[static_cast<std::size_t>(k)] = w(perm[static_cast<std::size_t>(k)]);
    xs.col(k) = x.col(perm[static_cast<std::size_t>(k)]);
  }
  spec.min_gap = min_pairwise_gap(spec.eigenvalues);

  const double gnorm = operator_norm_estimate(g);
  if (n > 1 && spec.min_gap < gap_floor * gnorm)
    throw DegenerateSpectrum("min eigenvalue gap " + std::to_string(spec.min_gap) +
                             " below floor");

  EigenSystem sys;
  sys.X = std::move(xs);
  sys.Y = sys.X.partialPivLu().solve(ComplexMatrix::Identity(n, n));

  double worst = 0.0;
  if (gnorm > 0.0) {
    ComplexMatrix resid = g * sys.X;
    for (int k = 0; k < n; ++k)
      resid.col(k) -= spec.eigenvalues[static_cast<std::size_t>(k)] * sys.X.col(k);
    for (int k = 0; k < n; ++k)
      worst = std::max(worst, resid.col(k).norm() / sys.X.col(k).norm());
    worst /= gnorm;
  }
  sys.residual_bound = worst;
  return {std::move(spec), std::move(sys)};
}

OverlapMatrix overlaps(const ComplexMatrix& X, const ComplexMatrix& Y) {
  // Gram matrices: A_ij = R_i^* R_j (columns of X), B_ij = L_i L_j^* (rows of Y).
  // Then O_ij = (R_j^* R_i)(L_j^* L_i) = A_ji * conj(B_ji) = A^t .* B^*  entrywise.
  ComplexMatrix a = X.adjoint() * X;   // a(i,j) = R_i^* R_j
  ComplexMatrix b = Y * Y.adjoint();   // b(i,j) = L_i^t conj(L_j) = L_j^* L_i
  OverlapMatrix out;
  out.O = a.transpose().cwiseProduct(b);
  // Diagonal is exactly real; scrub the zero imaginary part left by rounding.
  for (int i = 0; i < out.O.rows(); ++i) out.O(i, i) = Complex(out.O(i, i).real(), 0.0);
  return out;
}

std::vector<double> diag_overlaps(const ComplexMatrix& X, const ComplexMatrix& Y) {
  const int n = static_cast<int>(X.rows());
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    d[static_cast<std::size_t>(i)] = X.col(i).squaredNorm() * Y.row(i).squaredNorm();
  return d;
}

std::vector<double> condition_numbers(const OverlapMatrix& o) {
  std::vector<double> k(static_cast<std::size_t>(o.size()));
  for (int i = 0; i < o.size(); ++i) k[static_cast<std::size_t>(i)] = std::sqrt(o.diag(i));
  return k;
}

}  // namespace gin
