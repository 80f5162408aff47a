#pragma once

#include <span>

#include "gin/rng.hpp"
#include "gin/types.hpp"

namespace gin {

/// Joint sample of the three overlaps tied to the first two eigenvalues.
struct OverlapTriple {
  double o11 = 0.0;
  Complex o12 = 0.0;
  double o22 = 0.0;
};

/// Second moments of the pair overlaps, conditioned on the spectrum.
struct SecondMoments {
  double abs_o12_sq = 0.0;  // E |O_12|^2
  double o11_o22 = 0.0;     // E O_11 O_22
};

/// Geometry of an eigenvalue pair at squared microscopic separation
/// delta = N |l1 - l2|^2, with
///   a = delta/2 + sqrt(1 + delta^2/4),  b = -1/a,
/// so that a >= 1, a(-b) = 1 and delta = a - 1/a.
struct PairGeometry {
  double delta = 0.0;
  double a = 1.0;
  double b = -1.0;
  // a - 1 kept separately: near delta = 0 it carries the precision that the
  // difference a - 1.0 would lose.
  double a_minus_1 = 0.0;

  static PairGeometry from_delta(double delta);
  static PairGeometry from_pair(int n, Complex l1, Complex l2);

  /// delta recovered from a through delta = (a-1)(a+1)/a.
  double delta_from_a() const { return a_minus_1 * (a + 1.0) / a; }
};

/// Rolling state of the two left-eigenvector recurrences. b holds
/// (1, b_2, ..., b_n), d holds (0, 1, d_3, ..., d_n); the partial overlaps are
/// o11_n = ||B_n||^2, o12_n = -conj(b_2) B_n^t conj(D_n), o22_n = (1+|b_2|^2)||D_n||^2.
class ChainState {
 public:
  explicit ChainState(std::span<const Complex> eigenvalues);

  /// Advance with the next column of triangular Gaussians (variance 1/N each).
  void step(RngStream& rng);
  /// Advance with externally supplied column entries t_k = T(k, n), k < n.
  void step_with(std::span<const Complex> column);

  int index() const { return n_; }
  int dimension() const { return dim_; }
  double o11() const { return o11_; }
  Complex o12() const { return -std::conj(b_[1]) * bd_; }
  double o22() const { return (1.0 + std::norm(b_[1])) * o22_raw_; }
  OverlapTriple triple() const { return {o11(), o12(), o22()}; }

 private:
  std::vector<Complex> lambda_;
  std::vector<Complex> b_;   // (1, b_2, ..., b_n)
  std::vector<Complex> d_;   // (0, 1, d_3, ..., d_n)
  std::vector<Complex> col_;
  int dim_ = 0;
  int n_ = 0;             // entries filled so far
  double o11_ = 1.0;      // ||B_n||^2
  double o22_raw_ = 0.0;  // ||D_n||^2
  Complex bd_ = 0.0;      // B_n^t conj(D_n)
  double inv_sqrt_n_ = 0.0;
};

/// One joint draw of (O_11, O_12, O_22) conditionally on the spectrum, via the
/// triangular chain recurrences: O(N^2) time, O(N) memory, no eigensolver.
/// Throws GapTooSmall if lambda_1 or lambda_2 nearly collides with another
/// eigenvalue.
OverlapTriple chain_overlaps(const Spectrum& spectrum, RngStream& rng,
                             double gap_floor = 0.0);

/// Same recurrence driven by an explicit upper-triangular matrix T (diagonal =
/// spectrum). Lets one draw feed both this route and a full eigendecomposition.
OverlapTriple chain_overlaps_from_T(const ComplexMatrix& T);

/// One draw of O_11 = prod_n (1 + |X_n|^2 / (N |l1 - l_n|^2)) with independent
/// standard complex Gaussians X_n, accumulated in log space.
double quenched_diag_sample(const Spectrum& spectrum, RngStream& rng,
                            double gap_floor = 0.0);
double quenched_diag_sample_at(Complex lambda1, std::span<const Complex> others,
                               RngStream& rng, double gap_floor = 0.0);

/// E(O_11 | spectrum) = prod_n (1 + 1/(N |l1 - l_n|^2)), log-space product.
double quenched_diag_expectation(const Spectrum& spectrum, double gap_floor = 0.0);
double quenched_diag_expectation_at(Complex lambda1, std::span<const Complex> others,
                                    double gap_floor = 0.0);

/// E(O_12 | spectrum) = -(1/(N|l1-l2|^2)) prod_k (1 + 1/(N (l1-l_k) conj(l2-l_k))),
/// evaluated as a scaled factor-wise product.
Complex quenched_offdiag_expectation(const Spectrum& spectrum, double gap_floor = 0.0);

/// (E|O_12|^2, E O_11 O_22) conditionally on the spectrum: the two-component
/// moment recursion is codiagonalized, leaving products of the per-eigenvalue
/// weights
///   lp(n) = (1+|g1|^2)(1+|g2|^2) - a |g1 g2|^2,
///   lm(n) = (1+|g1|^2)(1+|g2|^2) - b |g1 g2|^2,  g_i = 1/(sqrt(N)(l_i - l_n)),
/// combined with the integrated moments of b_2 (E|b_2|^2 = 1/delta,
/// E|b_2|^4 = 2/delta^2). Throws DeltaDegenerate below delta_floor.
SecondMoments quenched_second_moments(const Spectrum& spectrum, double gap_floor = 0.0,
                                      double delta_floor = 1e-8);

/// Weight combination shared by the quenched products and the closed forms:
///   E|O_12|^2  = [ a^2/(a+1)^2 d+  +  a^2/(a-1)^2 d- ] / (1+a^2)
///   E O_11O_22 = [   1/(a+1)^2 d+  +  a^4/(a-1)^2 d- ] / (1+a^2)
/// with 1/(a-1)^2 rewritten through (a-1) = delta a/(a+1), which keeps full
/// precision down to microscopic separations.
SecondMoments combine_second_moments(const PairGeometry& g, double d_plus,
                                     double d_minus);

}  // namespace gin
