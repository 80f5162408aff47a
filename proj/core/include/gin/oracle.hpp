#pragma once

#include <functional>
#include <vector>

#include "gin/schur_chain.hpp"
#include "gin/types.hpp"

namespace gin {

struct TridiagonalSpec {
  std::vector<Complex> diag;    // length k
  std::vector<Complex> sub;     // length k-1, entries (i+1, i)
  std::vector<Complex> super;   // length k-1, entries (i, i+1)
};

/// Determinant by the three-term recurrence d_k = a_k d_{k-1} - c_k b_k d_{k-2},
/// with power-of-two rescaling against under/overflow.
Complex tridiag_det(const TridiagonalSpec& spec);

/// Dense determinant by partial-pivot elimination, as an independent check.
Complex dense_det(const ComplexMatrix& m);

/// The three tridiagonal families whose scaled determinants have elementary
/// closed forms in the partial exponential sums.
enum class AkFamily {
  plain,        // a_k = e^(k)(x)
  diag_mean,    // a_k = (k+1) e^(k+1)(x) - x e^(k)(x)
  offdiag_mean  // a_k = (k+2) x^{-2} e_2^(k+2)(x)
};

struct AkCheck {
  double recurrence = 0.0;
  double closed_form = 0.0;
  double rel_error = 0.0;
};

/// Builds the family's scaled tridiagonal determinant by recurrence and
/// compares it against the closed form.
AkCheck verify_ak_closed_form(AkFamily family, int k, double x);

/// Polar quadrature rule for integrals against the Gaussian ensemble weight
/// mu(dl) = (N/pi) e^{-N|l|^2} dm(l): generalized Gauss-Laguerre radially
/// (after the t = N r^2 substitution) times a trapezoid angular rule.
class GaussianDiskRule {
 public:
  GaussianDiskRule(int n, int radial_nodes, int angular_nodes);

  /// integral f(l) mu(dl).
  Complex integrate(const std::function<Complex(Complex)>& f) const;

 private:
  int angular_ = 0;
  std::vector<double> radius_;
  std::vector<double> weight_;
};

/// Gauss-Legendre nodes/weights on [-1, 1] by Golub-Welsch.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Laguerre nodes/weights for the weight e^{-t} on [0, inf).
void gauss_laguerre(int m, std::vector<double>& nodes, std::vector<double>& weights);

/// Adaptive polar quadrature of f over a disk or annulus centered at the
/// origin, minus a union of excluded disks. Radial panels split until the
/// Richardson error estimate meets tol; throws ToleranceNotReached otherwise.
struct DiskDomain {
  double r_lo = 0.0;
  double r_hi = 1.0;
};

struct ExclusionDisk {
  Complex center;
  double radius = 0.0;
};

Complex disk_integral(const std::function<Complex(Complex)>& f, const DiskDomain& domain,
                      const std::vector<ExclusionDisk>& excluded, double tol,
                      double* error_estimate = nullptr);

/// Adaptive 7/15 Gauss-Legendre quadrature on [a, b].
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol);

enum class MomentConditioning { none, origin, origin_and_z };

/// Andreief moment-matrix expectation of prod_k g(l_k) under the ensemble
/// conditioned on nothing, on (l_1 = 0), or on (l_1 = 0, l_2 = z): the k x k
/// moment determinant over 2-D quadrature with its stated normalization.
/// Quadrature cost limits the dimension to n <= 6.
double andreief_product_expectation(const std::function<double(Complex)>& g, int n,
                                    MomentConditioning conditioning, Complex z = 0.0,
                                    int radial_nodes = 48, int angular_nodes = 256);

/// Fully independent quadrature evaluation of the conditioned pair second
/// moments at (l_1 = 0, l_2 = z) for n <= 4: the expected weight products
/// E(d+), E(d-) by moment determinants, then the shared combination.
SecondMoments small_n_second_moment_oracle(int n, Complex z);

}  // namespace gin
