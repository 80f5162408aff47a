#include "gin/schur_chain.hpp"

#include <cmath>

#include "gin/errors.hpp"
#include "gin/spectral.hpp"

namespace gin {
namespace {

double spectrum_scale(std::span<const Complex> values) {
  double m = 0.0;
  for (const Complex& v : values) m = std::max(m, std::abs(v));
  return m > 0.0 ? m : 1.0;
}

double resolve_gap_floor(double gap_floor, std::span<const Complex> values) {
  return gap_floor > 0.0 ? gap_floor : kGapFloor * spectrum_scale(values);
}

void check_pair_gaps(std::span<const Complex> ev, int distinguished, double floor) {
  for (int d = 0; d < distinguished; ++d)
    for (std::size_t k = 0; k < ev.size(); ++k) {
      if (static_cast<int>(k) == d) continue;
      if (std::abs(ev[static_cast<std::size_t>(d)] - ev[k]) < floor)
        throw GapTooSmall("eigenvalue gap below floor at index " + std::to_string(k));
    }
}

// Product of real factors with scaling; tracks sign and a base-2 exponent so
// long products neither overflow nor underflow.
struct ScaledProduct {
  double mantissa = 1.0;
  long exp2 = 0;

  void multiply(double f) {
    mantissa *= f;
    if (mantissa == 0.0) return;
    int e = 0;
    mantissa = std::frexp(mantissa, &e);
    exp2 += e;
  }
  double value() const { return std::ldexp(mantissa, static_cast<int>(exp2)); }
};

struct ScaledComplexProduct {
  Complex mantissa = 1.0;
  long exp2 = 0;

  void multiply(Complex f) {
    mantissa *= f;
    const double m = std::abs(mantissa);
    if (m == 0.0) return;
    if (m > 0x1p+256 || m < 0x1p-256) {
      int e = 0;
      std::frexp(m, &e);
      mantissa = Complex(std::ldexp(mantissa.real(), -e), std::ldexp(mantissa.imag(), -e));
      exp2 += e;
    }
  }
  Complex value() const {
    return {std::ldexp(mantissa.real(), static_cast<int>(exp2)),
            std::ldexp(mantissa.imag(), static_cast<int>(exp2))};
  }
};

}  // namespace

PairGeometry PairGeometry::from_delta(double delta) {
  PairGeometry g;
  g.delta = delta;
  const double h = std::hypot(1.0, 0.5 * delta);
  g.a = 0.5 * delta + h;
  // h - 1 written without cancellation: (delta/2)^2 / (1 + h).
  g.a_minus_1 = 0.5 * delta + (0.25 * delta * delta) / (1.0 + h);
  g.b = -1.0 / g.a;
  return g;
}

PairGeometry PairGeometry::from_pair(int n, Complex l1, Complex l2) {
  return from_delta(static_cast<double>(n) * std::norm(l1 - l2));
}

ChainState::ChainState(std::span<const Complex> eigenvalues)
    : lambda_(eigenvalues.begin(), eigenvalues.end()),
      dim_(static_cast<int>(eigenvalues.size())),
      n_(1) {
  b_.reserve(lambda_.size());
  d_.reserve(lambda_.size());
  b_.push_back(1.0);
  d_.push_back(0.0);
  col_.resize(lambda_.size());
  inv_sqrt_n_ = 1.0 / std::sqrt(static_cast<double>(dim_));
}

void ChainState::step(RngStream& rng) {
  for (int k = 0; k < n_; ++k) col_[static_cast<std::size_t>(k)] = inv_sqrt_n_ * rng.complex_normal();
  step_with(std::span<const Complex>(col_.data(), static_cast<std::size_t>(n_)));
}

void ChainState::step_with(std::span<const Complex> column) {
  const int next = n_ + 1;  // 1-based index of the eigenvalue being absorbed
  const Complex ln = lambda_[static_cast<std::size_t>(next - 1)];

  Complex bt = 0.0;
  Complex dt = 0.0;
  for (int k = 0; k < n_; ++k) {
    bt += b_[static_cast<std::size_t>(k)] * column[static_cast<std::size_t>(k)];
    dt += d_[static_cast<std::size_t>(k)] * column[static_cast<std::size_t>(k)];
  }

  const Complex bn = bt / (lambda_[0] - ln);
  // d_2 = 1 by the biorthogonality normalization; the recurrence starts at 3.
  const Complex dn = (next == 2) ? Complex(1.0) : dt / (lambda_[1] - ln);

  b_.push_back(bn);
  d_.push_back(dn);
  o11_ += std::norm(bn);
  o22_raw_ += std::norm(dn);
  bd_ += bn * std::conj(dn);
  n_ = next;
}

OverlapTriple chain_overlaps(const Spectrum& spectrum, RngStream& rng, double gap_floor) {
  const auto& ev = spectrum.eigenvalues;
  if (spectrum.size() < 2) throw ConfigInvalid("chain overlaps need N >= 2");
  check_pair_gaps(ev, 2, resolve_gap_floor(gap_floor, ev));
  ChainState chain(ev);
  while (chain.index() < spectrum.size()) chain.step(rng);
  return chain.triple();
}

OverlapTriple chain_overlaps_from_T(const ComplexMatrix& T) {
  const int n = static_cast<int>(T.rows());
  if (n < 2) throw ConfigInvalid("chain overlaps need N >= 2");
  std::vector<Complex> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = T(i, i);
  check_pair_gaps(ev, 2, resolve_gap_floor(0.0, ev));
  ChainState chain(ev);
  std::vector<Complex> col(static_cast<std::size_t>(n));
  for (int j = 1; j < n; ++j) {
    for (int k = 0; k < j; ++k) col[static_cast<std::size_t>(k)] = T(k, j);
    chain.step_with(std::span<const Complex>(col.data(), static_cast<std::size_t>(j)));
  }
  return chain.triple();
}

double quenched_diag_sample_at(Complex lambda1, std::span<const Complex> others,
                               RngStream& rng, double gap_floor) {
  const double n = static_cast<double>(others.size() + 1);
  const double floor2 = [&] {
    std::vector<Complex> all(others.begin(), others.end());
    all.push_back(lambda1);
    const double f = resolve_gap_floor(gap_floor, all);
    return f * f;
  }();
  double log_sum = 0.0;
  for (const Complex& l : others) {
    const double d2 = std::norm(lambda1 - l);
    if (d2 < floor2) throw GapTooSmall("distance to lambda_1 below floor");
    // |X|^2 of a standard complex Gaussian is a unit exponential.
    log_sum += std::log1p(rng.exponential() / (n * d2));
  }
  return std::exp(log_sum);
}

double quenched_diag_sample(const Spectrum& spectrum, RngStream& rng, double gap_floor) {
  if (spectrum.size() < 1) throw ConfigInvalid("empty spectrum");
  std::span<const Complex> ev(spectrum.eigenvalues);
  return quenched_diag_sample_at(ev[0], ev.subspan(1), rng, gap_floor);
}

double quenched_diag_expectation_at(Complex lambda1, std::span<const Complex> others,
                                    double gap_floor) {
  const double n = static_cast<double>(others.size() + 1);
  std::vector<Complex> all(others.begin(), others.end());
  all.push_back(lambda1);
  const double floor = resolve_gap_floor(gap_floor, all);
  const double floor2 = floor * floor;
  double log_sum = 0.0;
  for (const Complex& l : others) {
    const double d2 = std::norm(lambda1 - l);
    if (d2 < floor2) throw GapTooSmall("distance to lambda_1 below floor");
    log_sum += std::log1p(1.0 / (n * d2));
  }
  return std::exp(log_sum);
}

double quenched_diag_expectation(const Spectrum& spectrum, double gap_floor) {
  if (spectrum.size() < 1) throw ConfigInvalid("empty spectrum");
  std::span<const Complex> ev(spectrum.eigenvalues);
  return quenched_diag_expectation_at(ev[0], ev.subspan(1), gap_floor);
}

Complex quenched_offdiag_expectation(const Spectrum& spectrum, double gap_floor) {
  const auto& ev = spectrum.eigenvalues;
  const int n = spectrum.size();
  if (n < 2) throw ConfigInvalid("offdiag expectation needs N >= 2");
  check_pair_gaps(ev, 2, resolve_gap_floor(gap_floor, ev));
  const double nn = static_cast<double>(n);
  ScaledComplexProduct prod;
  for (int k = 2; k < n; ++k) {
    const Complex u = ev[0] - ev[static_cast<std::size_t>(k)];
    const Complex v = ev[1] - ev[static_cast<std::size_t>(k)];
    prod.multiply(1.0 + 1.0 / (nn * u * std::conj(v)));
  }
  const double pref = -1.0 / (nn * std::norm(ev[0] - ev[1]));
  return pref * prod.value();
}

SecondMoments quenched_second_moments(const Spectrum& spectrum, double gap_floor,
                                      double delta_floor) {
  const auto& ev = spectrum.eigenvalues;
  const int n = spectrum.size();
  if (n < 2) throw ConfigInvalid("second moments need N >= 2");
  check_pair_gaps(ev, 2, resolve_gap_floor(gap_floor, ev));

  const PairGeometry g = PairGeometry::from_pair(n, ev[0], ev[1]);
  if (g.delta < delta_floor) throw DeltaDegenerate("pair separation delta below floor");

  const double nn = static_cast<double>(n);
  ScaledProduct dp;
  ScaledProduct dm;
  for (int k = 2; k < n; ++k) {
    const double g1 = 1.0 / (nn * std::norm(ev[0] - ev[static_cast<std::size_t>(k)]));
    const double g2 = 1.0 / (nn * std::norm(ev[1] - ev[static_cast<std::size_t>(k)]));
    const double base = (1.0 + g1) * (1.0 + g2);
    dp.multiply(base - g.a * g1 * g2);
    dm.multiply(base - g.b * g1 * g2);
  }

  return combine_second_moments(g, dp.value(), dm.value());
}

SecondMoments combine_second_moments(const PairGeometry& g, double d_plus,
                                     double d_minus) {
  const double a = g.a;
  const double ap1 = a + 1.0;
  const double norm = 1.0 / (1.0 + a * a);
  const double w12_p = a * a / (ap1 * ap1);
  const double w12_m = (ap1 * ap1) / (g.delta * g.delta);  // a^2/(a-1)^2
  const double wd_p = 1.0 / (ap1 * ap1);
  const double wd_m = a * a * (ap1 * ap1) / (g.delta * g.delta);  // a^4/(a-1)^2

  SecondMoments out;
  out.abs_o12_sq = norm * (w12_p * d_plus + w12_m * d_minus);
  out.o11_o22 = norm * (wd_p * d_plus + wd_m * d_minus);
  return out;
}

}  // namespace gin
