#pragma once

#include <vector>

#include "gin/types.hpp"

namespace gin {

/// Right eigenvectors as columns of X, left eigenvectors as rows of Y = X^-1,
/// so the biorthogonal normalization L_i^t R_j = delta_ij holds by construction.
struct EigenSystem {
  ComplexMatrix X;
  ComplexMatrix Y;
  double residual_bound = 0.0;  // max_i ||G R_i - l_i R_i|| / ||G||
};

/// O_ij = (R_j^* R_i)(L_j^* L_i). Diagonal entries are real and >= 1; every
/// row sums to one.
struct OverlapMatrix {
  ComplexMatrix O;

  int size() const { return static_cast<int>(O.rows()); }
  double diag(int i) const { return O(i, i).real(); }
};

/// Relative floor under which a spectrum counts as degenerate: samples with
/// min_gap < gap_floor * ||G|| are rejected (a measure-zero event in exact
/// arithmetic) and must be logged by the caller.
inline constexpr double kGapFloor = 1e-12;

/// Dense nonsymmetric eigendecomposition. Eigenvalues are sorted by (Re, Im);
/// Y is obtained from X by linear solve. Throws NonConvergence if the QR
/// iteration fails and DegenerateSpectrum if min_gap < gap_floor * ||G||.
std::pair<Spectrum, EigenSystem> eigendecompose(const ComplexMatrix& g,
                                                double gap_floor = kGapFloor);

/// Overlap matrix from the two Gram matrices:
///   O_ij = (X^* X)_ji * (Y Y^*)_ij,
/// with X holding right eigenvectors as columns and Y left eigenvectors as
/// rows. O(N^3) once, no per-pair loops.
OverlapMatrix overlaps(const ComplexMatrix& X, const ComplexMatrix& Y);

/// Diagonal overlaps only: O_ii = ||R_i||^2 ||L_i||^2, O(N^2).
std::vector<double> diag_overlaps(const ComplexMatrix& X, const ComplexMatrix& Y);

/// Condition numbers kappa_i = sqrt(O_ii).
std::vector<double> condition_numbers(const OverlapMatrix& o);

/// Operator-norm estimate by power iteration on G^* G (upper bound is not
/// required; this is only used to scale residuals and gap floors).
double operator_norm_estimate(const ComplexMatrix& g, int iters = 12);

}  // namespace gin
