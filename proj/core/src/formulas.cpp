#include "gin/formulas.hpp"

#include <cmath>
#include <limits>

#include "gin/errors.hpp"

namespace gin {
namespace {

constexpr double kPi = 3.14159265358979323846264338328;

// Positive partial sum held as mantissa * exp(log_scale), so ratios of sums
// with wildly different magnitudes lose no precision.
struct ScaledPosSum {
  double mantissa = 0.0;
  double log_scale = 0.0;

  bool zero() const { return mantissa == 0.0; }
  double log() const { return std::log(mantissa) + log_scale; }
  double value() const { return mantissa * std::exp(log_scale); }
};

// sum_{i=k}^{l} x^i/i! anchored at the largest term; all terms positive, so
// plain accumulation is stable. l = INT_MAX means "until convergence".
ScaledPosSum exp_partial_scaled(int k, int l, double x) {
  ScaledPosSum s;
  if (l < k) return s;
  if (x == 0.0) {
    if (k == 0) s.mantissa = 1.0;
    return s;
  }
  const int upper = (l == std::numeric_limits<int>::max()) ? k + (1 << 26) : l;
  const int anchor =
      std::clamp(static_cast<int>(std::llround(std::min(x, static_cast<double>(upper)))),
                 k, upper);
  s.log_scale = anchor * std::log(x) - std::lgamma(static_cast<double>(anchor) + 1.0);
  double acc = 1.0;  // anchor term, normalized
  double t = 1.0;
  for (long i = anchor + 1; i <= l; ++i) {  // forward: decays once i > x
    t *= x / static_cast<double>(i);
    acc += t;
    if (t < acc * 1e-18) break;
  }
  t = 1.0;
  for (long i = anchor; i > k; --i) {  // backward: decays once i < x
    t *= static_cast<double>(i) / x;
    acc += t;
    if (t < acc * 1e-18) break;
  }
  s.mantissa = acc;
  return s;
}

double checked_value(const ScaledPosSum& s) {
  const double v = s.value();
  if (!std::isfinite(v)) throw ArgumentTooLarge("partial exponential sum overflows");
  return v;
}

// (1 - (1+u) e^{-u}) via series for small u, where the direct form cancels.
double one_minus_1pu_emu(double u) {
  if (u > 0.05) return 1.0 - (1.0 + u) * std::exp(-u);
  // sum_{k>=2} (-1)^k (k-1)/k! u^k = u^2/2 - u^3/3 + u^4/8 - ...
  double t = u * u / 2.0;  // (-1)^k u^k / k! at k = 2
  double acc = t;
  for (int k = 3; k < 24; ++k) {
    t *= -u / k;
    const double contrib = t * (k - 1);
    acc += contrib;
    if (std::abs(contrib) < 1e-20 * std::abs(acc)) break;
  }
  return acc;
}

}  // namespace

double exp_partial_sum(int k, int l, double x) {
  if (k < 0 || x < 0.0 || (l != kUnbounded && l < k))
    throw ConfigInvalid("exp_partial_sum needs 0 <= k <= l and x >= 0");
  if (l == kUnbounded) {
    if (x > 709.0) throw ArgumentTooLarge("exp(x) not representable");
    if (x >= static_cast<double>(k)) {
      // exp(x) minus the head, head accumulated with compensation.
      double head = 0.0;
      double comp = 0.0;
      double t = 1.0;
      for (int i = 0; i < k; ++i) {
        const double y = t - comp;
        const double next = head + y;
        comp = (next - head) - y;
        head = next;
        t *= x / (i + 1);
      }
      return std::exp(x) - head;
    }
    return checked_value(exp_partial_scaled(k, std::numeric_limits<int>::max(), x));
  }
  return checked_value(exp_partial_scaled(k, l, x));
}

double u_coeff(int k, double x) { return 1.0 - (1.0 - 1.0 / x) / (k + 3); }

double recurrence_m1(int k, double x) {
  const double delta = x - 1.0 / x;
  return 1.0 + delta / (k + 3) + (1.0 - 1.0 / x) / (static_cast<double>(k) * (k + 3));
}

double recurrence_m2(int k, double x) {
  const double delta = x - 1.0 / x;
  return delta * (k + 1.0) * (k + 1.0) /
         (static_cast<double>(k) * (k + 2.0) * (k + 3.0));
}

double gk_closed_form(int k, double x) {
  const double delta = x - 1.0 / x;
  if (k == 0) return 1.0;
  if (k == 1) return 1.0 + delta / 4.0 + (1.0 - 1.0 / x) / 4.0;
  const double u = u_coeff(k, x);
  const double frac = (x + 1.0) / (x - 1.0);
  const double e3 = k >= 3 ? exp_partial_sum(3, k, delta) : 0.0;
  const double tail = (x + (k + 2.0) + (k + 1.0) * (k + 3.0) / x) *
                      std::exp((k - 1) * std::log(delta) - std::lgamma(k + 4.0));
  return 6.0 * u * frac * e3 / (x * delta * delta) - 3.0 * u / x + 6.0 * frac * tail;
}

double dk_closed_form(int k, const PairGeometry& g, PairBranch branch) {
  if (k < 0) throw ConfigInvalid("dk_closed_form needs k >= 0");
  if (g.delta <= 0.0) throw DeltaDegenerate("pair separation is zero");
  const double delta = g.delta;
  const double a = g.a;

  // Branch-resolved pieces, each written without subtractive cancellation:
  //   plus:  x = a,  x-1 = a_minus_1,        1-1/x = a_minus_1/a
  //   minus: x = b,  x-1 = -(a+1)/a,         1-1/x = 1+a
  const bool plus = branch == PairBranch::plus;
  const double x = plus ? a : g.b;
  const double one_minus_inv = plus ? g.a_minus_1 / a : 1.0 + a;

  if (k == 0) return 1.0;  // delta * a_0 / e_1^(1)(delta) = delta/delta
  if (k == 1) {
    const double a1 = 2.0 + delta / 2.0 + one_minus_inv / 2.0;
    return a1 / (1.0 + delta / 2.0);
  }

  const double xp1 = plus ? a + 1.0 : g.a_minus_1 / a;  // b+1 = (a-1)/a
  const double xm1 = plus ? g.a_minus_1 : -(a + 1.0) / a;
  const double frac = xp1 / xm1;
  const double u = 1.0 - one_minus_inv / (k + 3);

  const ScaledPosSum e1 = exp_partial_scaled(1, k + 1, delta);
  const double log_e1 = e1.log();
  const ScaledPosSum e3 = exp_partial_scaled(3, k, delta);
  const double r31 = e3.zero() ? 0.0 : std::exp(e3.log() - log_e1);
  const double r0 = std::exp(-log_e1);
  // delta^{k-1} / ((k+3)! e_1)
  const double rp = std::exp((k - 1) * std::log(delta) - std::lgamma(k + 4.0) - log_e1);

  const double q = x + (k + 2.0) + (k + 1.0) * (k + 3.0) / x;
  const double bracket =
      6.0 * u * frac * r31 / (x * delta) - 3.0 * u * delta * r0 / x + 6.0 * frac * q * delta * rp;
  return bracket * (k + 2.0) * (k + 3.0) / 6.0;
}

double mean_diag_exact(int n, Complex z) {
  if (n < 1) throw ConfigInvalid("mean_diag_exact needs N >= 1");
  const double x = n * std::norm(z);
  const ScaledPosSum head = exp_partial_scaled(0, n - 1, x);
  // Ratio e^(N)/e^(N-1) = 1 + t_N / e^(N-1) with the trailing term in logs.
  double ratio = 1.0;
  if (x > 0.0) {
    const double log_tn = n * std::log(x) - std::lgamma(n + 1.0);
    ratio += std::exp(log_tn - head.log());
  }
  return n * ratio - x;
}

double mean_diag_asymptotic(int n, Complex z) { return n * (1.0 - std::norm(z)); }

double mean_offdiag_exact_origin(int n, Complex z) {
  if (n < 2) throw ConfigInvalid("mean_offdiag_exact_origin needs N >= 2");
  if (z == Complex(0.0)) throw ConfigInvalid("mean_offdiag_exact_origin needs z != 0");
  const double x = n * std::norm(z);
  const ScaledPosSum s2 = exp_partial_scaled(2, n, x);
  const ScaledPosSum s1 = exp_partial_scaled(1, n, x);
  // -(N/x^2) e_2/e_1, assembled in log space so small x cannot overflow early.
  const double log_mag = std::log(static_cast<double>(n)) + s2.log() - s1.log() -
                         2.0 * std::log(x);
  return -std::exp(log_mag);
}

Complex mean_offdiag_asymptotic(int n, Complex z1, Complex z2) {
  if (z1 == z2) throw ConfigInvalid("mean_offdiag_asymptotic needs z1 != z2");
  const double w2 = n * std::norm(z1 - z2);  // |w|^2
  const double num = one_minus_1pu_emu(w2);
  const double den = -std::expm1(-w2);
  const Complex pref = -static_cast<double>(n) * (1.0 - z1 * std::conj(z2)) / (w2 * w2);
  return pref * (num / den);
}

SecondMoments second_moment_exact_origin(int n, Complex z) {
  if (n < 2) throw ConfigInvalid("second_moment_exact_origin needs N >= 2");
  if (z == Complex(0.0)) throw DeltaDegenerate("second moments diverge at z = 0");
  const PairGeometry g = PairGeometry::from_pair(n, 0.0, z);
  const double dp = dk_closed_form(n - 2, g, PairBranch::plus);
  const double dm = dk_closed_form(n - 2, g, PairBranch::minus);
  return combine_second_moments(g, dp, dm);
}

SecondMoments second_moment_asymptotic(int n, Complex z1, Complex z2) {
  if (z1 == z2) throw ConfigInvalid("second_moment_asymptotic needs z1 != z2");
  const double w2 = n * std::norm(z1 - z2);
  const double base = static_cast<double>(n) * static_cast<double>(n) *
                      (1.0 - std::norm(z1)) * (1.0 - std::norm(z2)) / (w2 * w2);
  const double den = -std::expm1(-w2);
  const double factor = (den + w2 * w2) / den;  // (1 + |w|^4 - e^{-w^2}) / (1 - e^{-w^2})
  return {base, base * factor};
}

double inv_gamma2_density(double t) {
  if (t <= 0.0) return 0.0;
  return std::exp(-1.0 / t) / (t * t * t);
}

double inv_gamma2_cdf(double t) {
  if (t <= 0.0) return 0.0;
  return (1.0 + 1.0 / t) * std::exp(-1.0 / t);
}

double beta_inv_finite_n_density(int n, double t) {
  if (n < 2) throw ConfigInvalid("beta_inv_finite_n_density needs N >= 2");
  if (t <= 1.0 / n) return 0.0;
  const double nn = static_cast<double>(n);
  return (nn - 1.0) / nn * std::pow(1.0 - 1.0 / (nn * t), nn - 2.0) / (t * t * t);
}

double beta_inv_finite_n_cdf(int n, double t) {
  if (n < 2) throw ConfigInvalid("beta_inv_finite_n_cdf needs N >= 2");
  if (t <= 1.0 / n) return 0.0;
  const double nn = static_cast<double>(n);
  const double s = 1.0 / (nn * t);  // in (0, 1)
  return std::pow(1.0 - s, nn - 1.0) * (1.0 + (nn - 1.0) * s);
}

double angle_limit_density(double t) {
  if (t <= 0.0) return 0.0;
  return one_minus_1pu_emu(t) / (t * t);
}

double angle_limit_cdf(double t) {
  if (t <= 0.0) return 0.0;
  return 1.0 + std::expm1(-t) / t;
}

double frechet_cdf(double y) {
  if (y <= 0.0) return 0.0;
  return std::exp(-1.0 / (6.0 * y * y));
}

Complex ginibre_kernel(int n, Complex z, Complex w) {
  if (n < 1) throw ConfigInvalid("ginibre_kernel needs N >= 1");
  const double s = 0.5 * n * (std::norm(z) + std::norm(w));
  const Complex c = static_cast<double>(n) * z * std::conj(w);
  const double cmag = std::abs(c);
  // Exponent shift at the largest term magnitude keeps every summand bounded.
  double shift = -s;
  if (cmag > 0.0) {
    const int peak = std::clamp(static_cast<int>(cmag), 0, n - 1);
    shift = peak * std::log(cmag) - std::lgamma(peak + 1.0) - s;
  }
  Complex acc = 0.0;
  for (int k = 0; k < n; ++k) {
    double log_mag = -s - shift;
    double phase = 0.0;
    if (k > 0) {
      log_mag += k * std::log(cmag) - std::lgamma(k + 1.0);
      phase = k * std::arg(c);
    }
    if (log_mag < -745.0) continue;
    acc += std::polar(std::exp(log_mag), phase);
  }
  return (n / kPi) * std::exp(shift) * acc;
}

}  // namespace gin
