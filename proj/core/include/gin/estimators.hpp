#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gin/types.hpp"

namespace gin {

/// Disk used to emulate conditioning on an eigenvalue location: radius
/// defaults to c * N^{-1/2} with c = 0.3, which keeps the window inside the
/// microscopic regime at every N.
struct DiskWindow {
  Complex center;
  double radius = 0.0;

  static DiskWindow microscopic(Complex center, int n, double c = 0.3);
  bool contains(Complex z) const { return std::abs(z - center) < radius; }
};

/// Pair window: two disk centers plus a band of microscopic separations
/// omega = sqrt(N)|l_i - l_j|.
struct PairWindow {
  Complex center1;
  Complex center2;
  double radius = 0.0;
  double omega_lo = 0.0;
  double omega_hi = 0.0;
};

/// Mean with its standard error; std_error is absent for a single sample.
struct EstimateWithCI {
  double mean = 0.0;
  std::optional<double> std_error;
  long count = 0;
};

struct ComplexEstimateWithCI {
  Complex mean = 0.0;
  std::optional<double> std_error_re;
  std::optional<double> std_error_im;
  long count = 0;
};

/// Neumaier-compensated accumulator; merge is associative and commutative up
/// to the compensation tolerance, so worker partials can be folded in any
/// order.
class CompensatedSum {
 public:
  void add(double x);
  void merge(const CompensatedSum& other);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Fold-style accumulator for windowed diagonal overlaps. Collects the mean
/// of O_ii over the window and the normalized samples O_ii / (N (1-|l|^2))
/// for distribution tests.
class DiagWindowAccumulator {
 public:
  DiagWindowAccumulator(DiskWindow window, int n) : window_(window), n_(n) {}

  void add(Complex lambda, double o_diag);
  void merge(const DiagWindowAccumulator& other);

  const DiskWindow& window() const { return window_; }
  long count() const { return static_cast<long>(normalized_.size()); }
  /// Throws EmptyWindow when nothing landed in the window.
  EstimateWithCI estimate() const;
  /// Normalized samples in insertion order.
  const std::vector<double>& normalized_samples() const { return normalized_; }

 private:
  DiskWindow window_;
  int n_;
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
  std::vector<double> normalized_;
};

/// Pair-window estimates of E O_12, E|O_12|^2 and E O_11 O_22, with ordered
/// pairs collected per matrix and per-matrix hit counts kept for reporting.
class PairWindowAccumulator {
 public:
  PairWindowAccumulator(PairWindow window, int n) : window_(window), n_(n) {}

  /// Feed every ordered pair (i, j), i != j, of one matrix.
  void add_matrix(const std::vector<Complex>& eigenvalues, const ComplexMatrix& overlaps);
  void merge(const PairWindowAccumulator& other);

  long count() const { return count_; }
  const std::vector<long>& per_matrix_counts() const { return per_matrix_; }
  ComplexEstimateWithCI mean_o12() const;
  EstimateWithCI mean_abs_o12_sq() const;
  EstimateWithCI mean_o11_o22() const;

 private:
  PairWindow window_;
  int n_;
  long count_ = 0;
  CompensatedSum re_, re_sq_, im_, im_sq_, abs_sq_, abs_sq_sq_, prod_, prod_sq_;
  std::vector<long> per_matrix_;
};

/// Sup distance between the empirical CDF of a sorted sample and a reference
/// CDF. The reference is also evaluated just below each sample point
/// (nextafter), so a point mass tested against its own step function scores 0.
double ks_distance(const std::vector<double>& sorted_sample,
                   const std::function<double(double)>& cdf);

/// One-sample Kolmogorov-Smirnov critical value c(alpha)/sqrt(n).
double ks_critical_value(long n, double alpha);

/// Two-sample KS distance; samples must be sorted.
double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

struct PseudospectrumVolume {
  double empirical = 0.0;  // sum over eigenvalues in the ball of pi O_jj eps^2
  double predicted = 0.0;  // eps^2 N^2 integral_ball (1-|z|^2) dm
  long eigenvalues_in_ball = 0;
};

/// Leading-order pseudospectrum volume inside a disk: empirical condition
/// number sum against the deterministic prediction (closed-form disk integral).
PseudospectrumVolume pseudospectrum_volume(const std::vector<Complex>& eigenvalues,
                                           const std::vector<double>& diag_overlaps,
                                           const DiskWindow& ball, double epsilon, int n);

/// Closed form of int_disk (1 - |z|^2) dm(z) for a disk fully handled in
/// polar form: pi r^2 (1 - |c|^2 - r^2/2).
double disk_one_minus_sq_integral(Complex center, double radius);

struct AnnulusRegion {
  double r_lo = 0.0;
  double r_hi = 0.0;
  bool contains(Complex z) const {
    const double r = std::abs(z);
    return r >= r_lo && r < r_hi;
  }
};

struct ExtremesReport {
  double min_diag = 0.0;
  double max_diag = 0.0;
  long count = 0;
  bool lower_violated = false;  // some O_ii < N^{1-eps_lower}
  bool upper_violated = false;  // some O_ii > N^{3/2+eps_upper}
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

/// Extreme diagonal overlaps over eigenvalues inside a union of annuli, with
/// violation flags at user-chosen exponents.
ExtremesReport extremes_scan(const std::vector<Complex>& eigenvalues,
                             const std::vector<double>& diag_overlaps,
                             const std::vector<AnnulusRegion>& region, int n,
                             double eps_lower, double eps_upper);

}  // namespace gin
