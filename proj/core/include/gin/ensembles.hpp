#pragma once

#include <vector>

#include "gin/rng.hpp"
#include "gin/types.hpp"

namespace gin {

enum class EnsembleKind {
  complex_gaussian,
  complex_bernoulli,
  complex_uniform_disk,
  real_gaussian,
};

/// Matrix ensemble with i.i.d. centered entries of variance E|G_ij|^2 =
/// entry_variance. The default 1/N makes the spectral radius tend to 1.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::complex_gaussian;
  int dimension = 0;
  double entry_variance = 0.0;  // 0 means use the default 1/N

  double variance() const {
    return entry_variance > 0.0 ? entry_variance : 1.0 / static_cast<double>(dimension);
  }
};

/// One draw with the standard complex Gaussian convention E|X|^2 = 1.
Complex sample_standard_complex_gaussian(RngStream& rng);

/// N x N matrix with i.i.d. entries per spec. Bernoulli entries are
/// (+-1 +- i)/sqrt(2N) at default variance; uniform-disk entries are drawn by
/// radius inversion and scaled to the same second moment.
ComplexMatrix sample_matrix(const EnsembleSpec& spec, RngStream& rng);

/// Radii {r_i} with {N r_i^2} distributed as independent Gamma(1), ..., Gamma(N).
std::vector<double> sample_kostlan_radii(int n, RngStream& rng);

/// Radii of the other N-1 eigenvalues given an eigenvalue at the origin:
/// {N r_i^2} distributed as independent Gamma(2), ..., Gamma(N).
std::vector<double> sample_conditioned_radii_origin(int n, RngStream& rng);

/// Upper-triangular matrix with diag(T) = spectrum and i.i.d. complex Gaussian
/// strict upper entries of variance 1/N.
ComplexMatrix sample_schur_T(const Spectrum& spectrum, RngStream& rng);

}  // namespace gin
