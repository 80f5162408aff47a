#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace gin {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

/// Ordered list of eigenvalues with its minimum pairwise gap.
struct Spectrum {
  std::vector<Complex> eigenvalues;
  double min_gap = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }

  static Spectrum from(std::vector<Complex> values);
};

/// Smallest pairwise distance; 0 for fewer than two points.
double min_pairwise_gap(const std::vector<Complex>& values);

}  // namespace gin
