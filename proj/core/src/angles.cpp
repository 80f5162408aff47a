#include "gin/angles.hpp"

#include <algorithm>
#include <cmath>

#include "gin/errors.hpp"
#include "gin/estimators.hpp"
#include "gin/formulas.hpp"

namespace gin {

Complex eigenvector_angle(const ComplexMatrix& X, int i, int j) {
  const double ni = X.col(i).norm();
  const double nj = X.col(j).norm();
  if (ni == 0.0 || nj == 0.0) throw ConfigInvalid("angle of a zero column");
  const Complex ip = X.col(i).adjoint() * X.col(j);
  return ip / (ni * nj);
}

Complex phi_map(Complex z) { return z / std::sqrt(1.0 + std::norm(z)); }

Complex phi_inverse(Complex w) {
  const double m = std::norm(w);
  if (m >= 1.0) throw ConfigInvalid("phi_inverse needs |w| < 1");
  return w / std::sqrt(1.0 - m);
}

KsReport angle_distribution_test(const std::vector<AngleSample>& samples,
                                 double threshold, long min_samples) {
  if (static_cast<long>(samples.size()) < min_samples)
    throw InsufficientSamples("angle test needs at least " + std::to_string(min_samples));
  std::vector<double> sq;
  sq.reserve(samples.size());
  for (const auto& s : samples) {
    const Complex x = phi_inverse(s.value) * s.omega;
    sq.push_back(std::norm(x));
  }
  std::sort(sq.begin(), sq.end());
  KsReport r;
  r.test_name = "angle_microscopic";
  r.n = static_cast<long>(sq.size());
  r.distance = ks_distance(sq, [](double t) { return t <= 0.0 ? 0.0 : -std::expm1(-t); });
  r.threshold = threshold;
  r.pass = r.distance < threshold;
  return r;
}

double angle_origin_cdf(int n, double t) {
  if (t <= 0.0) return 0.0;
  if (n == 0) return angle_limit_cdf(t);
  // N beta_{1,U}: average the Beta(1,k) CDFs 1 - (1 - t/N)^k over k = 2..N.
  if (t >= n) return 1.0;
  const double base = 1.0 - t / n;
  double acc = 0.0;
  double pw = base;  // base^k, starting at k = 1
  for (int k = 2; k <= n; ++k) {
    pw *= base;
    acc += 1.0 - pw;
  }
  return acc / (n - 1);
}

KsReport angle_origin_test(const std::vector<double>& n_angle_sq, int n, double threshold,
                           long min_samples) {
  if (static_cast<long>(n_angle_sq.size()) < min_samples)
    throw InsufficientSamples("angle test needs at least " + std::to_string(min_samples));
  std::vector<double> sorted = n_angle_sq;
  std::sort(sorted.begin(), sorted.end());
  KsReport r;
  r.test_name = n == 0 ? "angle_origin_limit" : "angle_origin";
  r.n = static_cast<long>(sorted.size());
  r.distance = ks_distance(sorted, [n](double t) { return angle_origin_cdf(n, t); });
  r.threshold = threshold;
  r.pass = r.distance < threshold;
  return r;
}

}  // namespace gin
