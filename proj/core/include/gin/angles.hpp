#pragma once

#include <string>
#include <vector>

#include "gin/types.hpp"

namespace gin {

/// Normalized inner product of right eigenvectors i and j (columns of X):
/// R_i^* R_j / (||R_i|| ||R_j||). The modulus is scale invariant; the phase
/// depends on the eigenvector phase convention.
Complex eigenvector_angle(const ComplexMatrix& X, int i, int j);

/// Phi(z) = z / sqrt(1 + |z|^2); maps the plane into the open unit disk.
Complex phi_map(Complex z);

/// Inverse of phi_map on the open disk: w / sqrt(1 - |w|^2).
Complex phi_inverse(Complex w);

struct AngleSample {
  int i = 0;
  int j = 0;
  Complex value;
  double omega = 0.0;  // sqrt(N) |l_i - l_j|
};

struct KsReport {
  std::string test_name;
  long n = 0;
  double distance = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Microscopic angle law: pulls each sample back through phi_inverse, scales
/// by its own separation omega, and tests the squared modulus against the
/// unit-mean exponential (the squared modulus of a standard complex Gaussian).
/// Throws InsufficientSamples below min_samples.
KsReport angle_distribution_test(const std::vector<AngleSample>& samples,
                                 double threshold, long min_samples = 1000);

/// At-origin law: tests samples of N |angle|^2 against the finite-N reference
/// CDF, the average of Beta(1, k) CDFs over k = 2..N (pass n = 0 for the
/// continuum limit CDF 1 - (1-e^{-t})/t).
KsReport angle_origin_test(const std::vector<double>& n_angle_sq, int n, double threshold,
                           long min_samples = 1000);

/// Reference CDF of N |angle|^2 at the origin for finite N.
double angle_origin_cdf(int n, double t);

}  // namespace gin
