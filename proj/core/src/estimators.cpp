#include "gin/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gin/errors.hpp"

namespace gin {
namespace {

constexpr double kPi = 3.14159265358979323846264338328;

std::optional<double> stderr_from(const CompensatedSum& s, const CompensatedSum& s2,
                                  long n) {
  if (n < 2) return std::nullopt;
  const double mean = s.value() / n;
  const double var = std::max(0.0, s2.value() / n - mean * mean) * n / (n - 1.0);
  return std::sqrt(var / n);
}

}  // namespace

DiskWindow DiskWindow::microscopic(Complex center, int n, double c) {
  return {center, c / std::sqrt(static_cast<double>(n))};
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) {
  add(other.sum_);
  comp_ += other.comp_;
}

void DiagWindowAccumulator::add(Complex lambda, double o_diag) {
  if (!window_.contains(lambda)) return;
  sum_.add(o_diag);
  sum_sq_.add(o_diag * o_diag);
  normalized_.push_back(o_diag / (n_ * (1.0 - std::norm(lambda))));
}

void DiagWindowAccumulator::merge(const DiagWindowAccumulator& other) {
  sum_.merge(other.sum_);
  sum_sq_.merge(other.sum_sq_);
  normalized_.insert(normalized_.end(), other.normalized_.begin(), other.normalized_.end());
}

EstimateWithCI DiagWindowAccumulator::estimate() const {
  const long n = count();
  if (n == 0) throw EmptyWindow("no eigenvalue fell inside the window");
  EstimateWithCI e;
  e.count = n;
  e.mean = sum_.value() / n;
  e.std_error = stderr_from(sum_, sum_sq_, n);
  return e;
}

void PairWindowAccumulator::add_matrix(const std::vector<Complex>& ev,
                                       const ComplexMatrix& o) {
  const std::size_t m = ev.size();
  const double sqn = std::sqrt(static_cast<double>(n_));
  long hits = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(ev[i] - window_.center1) >= window_.radius) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      if (std::abs(ev[j] - window_.center2) >= window_.radius) continue;
      const double omega = sqn * std::abs(ev[i] - ev[j]);
      if (omega < window_.omega_lo || omega >= window_.omega_hi) continue;
      const Complex o12 = o(static_cast<int>(i), static_cast<int>(j));
      const double o11 = o(static_cast<int>(i), static_cast<int>(i)).real();
      const double o22 = o(static_cast<int>(j), static_cast<int>(j)).real();
      re_.add(o12.real());
      re_sq_.add(o12.real() * o12.real());
      im_.add(o12.imag());
      im_sq_.add(o12.imag() * o12.imag());
      abs_sq_.add(std::norm(o12));
      abs_sq_sq_.add(std::norm(o12) * std::norm(o12));
      prod_.add(o11 * o22);
      prod_sq_.add(o11 * o22 * o11 * o22);
      ++hits;
    }
  }
  per_matrix_.push_back(hits);
  count_ += hits;
}

void PairWindowAccumulator::merge(const PairWindowAccumulator& other) {
  re_.merge(other.re_);
  re_sq_.merge(other.re_sq_);
  im_.merge(other.im_);
  im_sq_.merge(other.im_sq_);
  abs_sq_.merge(other.abs_sq_);
  abs_sq_sq_.merge(other.abs_sq_sq_);
  prod_.merge(other.prod_);
  prod_sq_.merge(other.prod_sq_);
  per_matrix_.insert(per_matrix_.end(), other.per_matrix_.begin(), other.per_matrix_.end());
  count_ += other.count_;
}

ComplexEstimateWithCI PairWindowAccumulator::mean_o12() const {
  if (count_ == 0) throw EmptyWindow("no pair fell inside the band");
  ComplexEstimateWithCI e;
  e.count = count_;
  e.mean = Complex(re_.value() / count_, im_.value() / count_);
  e.std_error_re = stderr_from(re_, re_sq_, count_);
  e.std_error_im = stderr_from(im_, im_sq_, count_);
  return e;
}

EstimateWithCI PairWindowAccumulator::mean_abs_o12_sq() const {
  if (count_ == 0) throw EmptyWindow("no pair fell inside the band");
  return {abs_sq_.value() / count_, stderr_from(abs_sq_, abs_sq_sq_, count_), count_};
}

EstimateWithCI PairWindowAccumulator::mean_o11_o22() const {
  if (count_ == 0) throw EmptyWindow("no pair fell inside the band");
  return {prod_.value() / count_, stderr_from(prod_, prod_sq_, count_), count_};
}

double ks_distance(const std::vector<double>& sorted_sample,
                   const std::function<double(double)>& cdf) {
  const std::size_t n = sorted_sample.size();
  if (n == 0) throw InsufficientSamples("ks_distance needs a nonempty sample");
  // Convention: both CDFs jump at sample points, so pre-jump values are
  // compared with the reference left limit (predecessor float) and post-jump
  // values with the reference at the point. Tied samples form one jump; a
  // point mass tested against its own step function scores exactly 0.
  double d = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::size_t i = 0;
  while (i < n) {
    const double x = sorted_sample[i];
    std::size_t j = i;
    while (j < n && sorted_sample[j] == x) ++j;  // [i, j) are ties at x
    const double post = cdf(x);
    const double pre = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    d = std::max(d, std::abs(pre - i * inv_n));
    d = std::max(d, std::abs(post - j * inv_n));
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_critical_value(long n, double alpha) {
  // c(alpha) = sqrt(-log(alpha/2)/2); 1.6276 at alpha = 0.01.
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw InsufficientSamples("two-sample KS needs data");
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

double disk_one_minus_sq_integral(Complex center, double radius) {
  return kPi * radius * radius * (1.0 - std::norm(center) - radius * radius / 2.0);
}

PseudospectrumVolume pseudospectrum_volume(const std::vector<Complex>& eigenvalues,
                                           const std::vector<double>& diag,
                                           const DiskWindow& ball, double epsilon, int n) {
  PseudospectrumVolume v;
  const double eps2 = epsilon * epsilon;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    if (!ball.contains(eigenvalues[j])) continue;
    v.empirical += kPi * diag[j] * eps2;
    ++v.eigenvalues_in_ball;
  }
  v.predicted = eps2 * static_cast<double>(n) * static_cast<double>(n) *
                disk_one_minus_sq_integral(ball.center, ball.radius);
  return v;
}

ExtremesReport extremes_scan(const std::vector<Complex>& eigenvalues,
                             const std::vector<double>& diag,
                             const std::vector<AnnulusRegion>& region, int n,
                             double eps_lower, double eps_upper) {
  ExtremesReport r;
  r.lower_bound = std::pow(static_cast<double>(n), 1.0 - eps_lower);
  r.upper_bound = std::pow(static_cast<double>(n), 1.5 + eps_upper);
  r.min_diag = std::numeric_limits<double>::infinity();
  r.max_diag = 0.0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    bool inside = false;
    for (const auto& a : region)
      if (a.contains(eigenvalues[i])) {
        inside = true;
        break;
      }
    if (!inside) continue;
    ++r.count;
    r.min_diag = std::min(r.min_diag, diag[i]);
    r.max_diag = std::max(r.max_diag, diag[i]);
  }
  if (r.count == 0) {
    r.min_diag = 0.0;
    return r;  // flags stay vacuously false
  }
  r.lower_violated = r.min_diag < r.lower_bound;
  r.upper_violated = r.max_diag > r.upper_bound;
  return r;
}

}  // namespace gin
