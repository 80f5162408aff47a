#pragma once

#include "gin/schur_chain.hpp"
#include "gin/types.hpp"

namespace gin {

/// Upper-index sentinel for unbounded partial sums.
inline constexpr int kUnbounded = -1;

/// Partial sum of the exponential series, e_k^(l)(x) = sum_{i=k}^{l} x^i / i!.
/// Pass l = kUnbounded for the full tail; that branch switches between a
/// series from below (x < k) and exp(x) minus a compensated head (x >= k).
/// Throws ArgumentTooLarge when the result is not representable.
double exp_partial_sum(int k, int l, double x);

/// u_k(x) = 1 - (1 - 1/x)/(k+3), the solved branch of the pair-moment
/// three-term recurrence.
double u_coeff(int k, double x);

/// Coefficients of that recurrence, f_k = m1 f_{k-1} - m2 f_{k-2}; the pair
/// separation enters through delta = x - 1/x.
double recurrence_m1(int k, double x);
double recurrence_m2(int k, double x);

/// Closed form of the normalized determinant sequence g_k driven by the same
/// recurrence (g_0 = 1, g_1 = 1 + delta/4 + (1-1/x)/4). Intended for x = a >= 1
/// moderately away from 1; dk_closed_form is the cancellation-safe entry point.
double gk_closed_form(int k, double x);

enum class PairBranch { plus, minus };

/// E(d+-) for dimension N = k+2: the expected weight product
///   delta * a_k(x) / e_1^(k+1)(delta)
/// at x = a (plus) or x = b (minus), evaluated with the (x-1) factors
/// rewritten through the pair geometry so microscopic delta stays stable.
double dk_closed_form(int k, const PairGeometry& g, PairBranch branch);

/// E(O_11 | l_1 = z) = N e^(N)(x)/e^(N-1)(x) - x with x = N|z|^2, exact at
/// every N, evaluated through normalized Poisson-type sums.
double mean_diag_exact(int n, Complex z);

/// Bulk limit N (1 - |z|^2).
double mean_diag_asymptotic(int n, Complex z);

/// E(O_12 | l_1 = 0, l_2 = z) = -(N/x^2) e_2^(N)(x)/e_1^(N)(x), x = N|z|^2.
double mean_offdiag_exact_origin(int n, Complex z);

/// Microscopic/mesoscopic limit
///   -N (1 - z1 conj(z2))/|w|^4 * (1-(1+|w|^2) e^{-|w|^2})/(1-e^{-|w|^2}),
/// with w = sqrt(N)|z1 - z2|; small separations go through a series branch.
Complex mean_offdiag_asymptotic(int n, Complex z1, Complex z2);

/// (E|O_12|^2, E O_11 O_22) conditioned on (l_1 = 0, l_2 = z), exact finite-N
/// closed form via dk_closed_form on both branches. Requires z != 0.
SecondMoments second_moment_exact_origin(int n, Complex z);

/// Their bulk limits N^2 (1-|z1|^2)(1-|z2|^2)/|w|^4 and the same times
/// (1 + |w|^4 - e^{-|w|^2})/(1 - e^{-|w|^2}).
SecondMoments second_moment_asymptotic(int n, Complex z1, Complex z2);

/// Inverse-Gamma(2) limit law of bulk diagonal overlaps over N(1-|z|^2).
double inv_gamma2_density(double t);
double inv_gamma2_cdf(double t);

/// Finite-N law of O_11/N at the origin: (N-1)/N (1 - 1/(Nt))^{N-2} / t^3 on
/// t > 1/N, and its distribution function.
double beta_inv_finite_n_density(int n, double t);
double beta_inv_finite_n_cdf(int n, double t);

/// Limit density (1-(1+t)e^{-t})/t^2 of N |angle|^2 at the origin, with CDF
/// 1 - (1-e^{-t})/t.
double angle_limit_density(double t);
double angle_limit_cdf(double t);

/// Heuristic limit of max_i O_ii / N^{3/2}: exp(-1/(6 y^2)).
double frechet_cdf(double y);

/// K_N(z, w) = (N/pi) e^{-N(|z|^2+|w|^2)/2} sum_{k<N} (N z conj(w))^k / k!,
/// evaluated with a common exponent shift so large N stays in range.
Complex ginibre_kernel(int n, Complex z, Complex w);

}  // namespace gin
