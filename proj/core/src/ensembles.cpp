#include "gin/ensembles.hpp"

#include <cmath>
#include <limits>

#include "gin/errors.hpp"

namespace gin {

Spectrum Spectrum::from(std::vector<Complex> values) {
  Spectrum s;
  s.min_gap = min_pairwise_gap(values);
  s.eigenvalues = std::move(values);
  return s;
}

double min_pairwise_gap(const std::vector<Complex>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) return 0.0;
  double g = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g = std::min(g, std::abs(values[i] - values[j]));
  return g;
}

Complex sample_standard_complex_gaussian(RngStream& rng) { return rng.complex_normal(); }

ComplexMatrix sample_matrix(const EnsembleSpec& spec, RngStream& rng) {
  const int n = spec.dimension;
  if (n < 1) throw ConfigInvalid("ensemble dimension must be >= 1");
  const double v = spec.variance();
  ComplexMatrix g(n, n);
  switch (spec.kind) {
    case EnsembleKind::complex_gaussian: {
      const double s = std::sqrt(v);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = s * rng.complex_normal();
      break;
    }
    case EnsembleKind::complex_bernoulli: {
      // +-1 real and imaginary parts, scaled so E|G|^2 = v.
      const double s = std::sqrt(v / 2.0);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const std::uint64_t bits = rng.next_u64();
          g(i, j) = Complex(bits & 1 ? s : -s, bits & 2 ? s : -s);
        }
      break;
    }
    case EnsembleKind::complex_uniform_disk: {
      // Uniform on a centered disk via sqrt(U) e^{i theta}; E|G|^2 = R^2/2,
      // so R = sqrt(2v) matches the common variance convention.
      const double radius = std::sqrt(2.0 * v);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double r = radius * std::sqrt(rng.uniform());
          const double t = rng.angle();
          g(i, j) = Complex(r * std::cos(t), r * std::sin(t));
        }
      break;
    }
    case EnsembleKind::real_gaussian: {
      const double s = std::sqrt(v);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = s * rng.normal();
      break;
    }
  }
  return g;
}

std::vector<double> sample_kostlan_radii(int n, RngStream& rng) {
  if (n < 1) throw ConfigInvalid("kostlan radii need n >= 1");
  std::vector<double> r(static_cast<std::size_t>(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 1; i <= n; ++i)
    r[static_cast<std::size_t>(i - 1)] = std::sqrt(rng.gamma_int(static_cast<std::uint64_t>(i)) * inv_n);
  return r;
}

std::vector<double> sample_conditioned_radii_origin(int n, RngStream& rng) {
  if (n < 2) throw ConfigInvalid("conditioned radii need n >= 2");
  std::vector<double> r(static_cast<std::size_t>(n - 1));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 2; i <= n; ++i)
    r[static_cast<std::size_t>(i - 2)] = std::sqrt(rng.gamma_int(static_cast<std::uint64_t>(i)) * inv_n);
  return r;
}

ComplexMatrix sample_schur_T(const Spectrum& spectrum, RngStream& rng) {
  const int n = spectrum.size();
  if (n < 1) throw ConfigInvalid("schur T needs a nonempty spectrum");
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix t = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) t(i, j) = s * rng.complex_normal();
    t(j, j) = spectrum.eigenvalues[static_cast<std::size_t>(j)];
  }
  return t;
}

}  // namespace gin
