#include <doctest.h>

#include <cmath>

#include "gin/errors.hpp"
#include "gin/formulas.hpp"
#include "gin/oracle.hpp"
#include "gin/schur_chain.hpp"

using namespace gin;

TEST_CASE("partial exponential sums") {
  CHECK(exp_partial_sum(0, 2, 1.0) == doctest::Approx(2.5));
  CHECK(exp_partial_sum(3, 3, 2.0) == doctest::Approx(8.0 / 6.0));
  for (double x : {0.5, 5.0, 100.0})
    CHECK(exp_partial_sum(2, kUnbounded, x) ==
          doctest::Approx(std::exp(x) - 1.0 - x).epsilon(1e-13));
  // Series-from-below branch (x < k) against the complement.
  CHECK(exp_partial_sum(40, kUnbounded, 3.0) ==
        doctest::Approx(std::exp(3.0) - exp_partial_sum(0, 39, 3.0)));
  CHECK_THROWS_AS(exp_partial_sum(0, kUnbounded, 800.0), ArgumentTooLarge);
  CHECK_THROWS_AS(exp_partial_sum(3, 2, 1.0), ConfigInvalid);
  CHECK(exp_partial_sum(2, 5, 0.0) == 0.0);
  CHECK(exp_partial_sum(0, 5, 0.0) == 1.0);

  SUBCASE("additivity identity on a grid") {
    for (int k : {1, 3, 17, 60, 150})
      for (int l : {1, 20, 90, 200}) {
        if (l < k) continue;
        for (double x : {0.0, 0.3, 7.0, 41.0, 100.0}) {
          const double whole = exp_partial_sum(0, l, x);
          const double split = exp_partial_sum(0, k - 1, x) + exp_partial_sum(k, l, x);
          CHECK(std::abs(whole - split) <= 1e-12 * whole);
        }
      }
  }
}

TEST_CASE("exact conditional mean of the diagonal overlap") {
  CHECK(mean_diag_exact(7, 0.0) == doctest::Approx(7.0));
  CHECK(mean_diag_exact(1, Complex(0.4, 0.2)) == doctest::Approx(1.0));
  SUBCASE("brute-force small case") {
    // Long-double transcription of N e^(N)/e^(N-1) - x as an independent route.
    const int n = 6;
    const double x = 2.3;
    long double num = 0.0L, den = 0.0L, term = 1.0L;
    for (int i = 0; i <= n; ++i) {
      num += term;
      if (i < n) den += term;
      term *= x / (i + 1);
    }
    const double expected = static_cast<double>(n * num / den - x);
    CHECK(mean_diag_exact(n, std::sqrt(x / n)) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("bulk asymptotics at N=500") {
    for (double r : {0.0, 0.3, 0.5}) {
      const double v = mean_diag_exact(500, r);
      CHECK(std::abs(v / mean_diag_asymptotic(500, r) - 1.0) < 1e-6);
    }
  }
  SUBCASE("large argument stays finite") {
    const double v = mean_diag_exact(2000, 0.9);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}

TEST_CASE("bulk mean is N(1-|z|^2)") {
  CHECK(mean_diag_asymptotic(100, 0.0) == doctest::Approx(100.0));
  CHECK(mean_diag_asymptotic(100, Complex(1.0, 0.0)) == doctest::Approx(0.0));
  CHECK(mean_diag_asymptotic(1000, 0.6) == doctest::Approx(640.0));
}

TEST_CASE("exact off-diagonal mean at the origin") {
  SUBCASE("closed N=2 value") {
    const double x = 1.7;
    const double z = std::sqrt(x / 2.0);
    CHECK(mean_offdiag_exact_origin(2, z) ==
          doctest::Approx(-1.0 / (x * (1.0 + x / 2.0))).epsilon(1e-13));
  }
  SUBCASE("small-separation blowup -N/(2x)") {
    const int n = 30;
    const double x = 1e-9;
    const double v = mean_offdiag_exact_origin(n, std::sqrt(x / n));
    CHECK(v == doctest::Approx(-n / (2.0 * x)).epsilon(1e-6));
  }
  SUBCASE("mesoscopic tail -N/x^2") {
    const int n = 100;
    const double x = 50.0;
    const double v = mean_offdiag_exact_origin(n, std::sqrt(x / n));
    CHECK(v == doctest::Approx(-n / (x * x)).epsilon(1e-3));
  }
}

TEST_CASE("off-diagonal asymptotic formula") {
  SUBCASE("agrees with the exact origin form at N=500, omega=2") {
    const int n = 500;
    const double z = 2.0 / std::sqrt(static_cast<double>(n));
    const double exact = mean_offdiag_exact_origin(n, z);
    const Complex asym = mean_offdiag_asymptotic(n, 0.0, z);
    CHECK(std::abs(asym.real() - exact) <= 0.01 * std::abs(exact));
    CHECK(std::abs(asym.imag()) < 1e-12 * std::abs(exact));
  }
  SUBCASE("mesoscopic limit at z1=0") {
    const int n = 400;
    const Complex z2(0.5, 0.0);  // omega^2 = 100, exponentials negligible
    const Complex v = mean_offdiag_asymptotic(n, 0.0, z2);
    CHECK(v.real() == doctest::Approx(-1.0 / (n * std::pow(std::abs(z2), 4.0))).epsilon(1e-6));
  }
  SUBCASE("microscopic series branch") {
    const int n = 100;
    const Complex z1(0.1, 0.0);
    const Complex z2 = z1 + Complex(1e-6, 0.0);
    const double w2 = n * std::norm(z1 - z2);
    const Complex v = mean_offdiag_asymptotic(n, z1, z2);
    const Complex leading = -static_cast<double>(n) * (1.0 - z1 * std::conj(z2)) / (2.0 * w2);
    CHECK(std::abs(v - leading) <= 1e-5 * std::abs(leading));
  }
}

TEST_CASE("finite-N pair second moments against their asymptotics") {
  const int n = 10'000;
  const double z = 2.0 / std::sqrt(static_cast<double>(n));  // omega = 2
  const SecondMoments exact = second_moment_exact_origin(n, z);
  const SecondMoments asym = second_moment_asymptotic(n, 0.0, z);
  CHECK(exact.abs_o12_sq == doctest::Approx(asym.abs_o12_sq).epsilon(0.02));
  CHECK(exact.o11_o22 == doctest::Approx(asym.o11_o22).epsilon(0.02));
  SUBCASE("correlation factor tends to one at small separation") {
    const SecondMoments tiny = second_moment_asymptotic(n, 0.0, 1e-8);
    CHECK(tiny.o11_o22 / tiny.abs_o12_sq == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("independence factorization at large separation") {
    // E O11 O22 ~ (N(1-|z1|^2))(N(1-|z2|^2)) once omega is mesoscopic.
    const Complex z1(0.1, 0.0), z2(0.5, 0.3);
    const SecondMoments far = second_moment_asymptotic(n, z1, z2);
    const double product = mean_diag_asymptotic(n, z1) * mean_diag_asymptotic(n, z2);
    CHECK(far.o11_o22 == doctest::Approx(product).epsilon(1e-3));
  }
}

TEST_CASE("closed-form pair moments trace back to the raw recurrence") {
  // Iterate a_k directly from its three-term recurrence (independent
  // transcription) and compare E(d) = delta a_k / e_1^(k+1)(delta).
  for (double delta : {0.5, 2.0, 7.0}) {
    const PairGeometry g = PairGeometry::from_delta(delta);
    for (const PairBranch branch : {PairBranch::plus, PairBranch::minus}) {
      const double x = branch == PairBranch::plus ? g.a : g.b;
      double prev = 1.0;                                       // a_0
      double cur = 2.0 + delta / 2.0 + (1.0 - 1.0 / x) / 2.0;  // a_1
      for (int k = 2; k <= 40; ++k) {
        const double next = (1.0 + (2.0 + delta) / (k + 1) +
                             (1.0 - 1.0 / x) / (static_cast<double>(k) * (k + 1))) *
                                cur -
                            delta * (k + 1.0) / (static_cast<double>(k) * k) * prev;
        prev = cur;
        cur = next;
        const double expected = delta * cur / exp_partial_sum(1, k + 1, delta);
        const double got = dk_closed_form(k, g, branch);
        CHECK(got == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("exact origin second moments reduce to the gaussian case at N=2") {
  const Complex z(0.4, 0.1);
  const SecondMoments closed = second_moment_exact_origin(2, z);
  const SecondMoments quenched =
      quenched_second_moments(Spectrum::from({Complex(0.0), z}));
  CHECK(closed.abs_o12_sq == doctest::Approx(quenched.abs_o12_sq).epsilon(1e-12));
  CHECK(closed.o11_o22 == doctest::Approx(quenched.o11_o22).epsilon(1e-12));
}

TEST_CASE("inverse gamma-2 law") {
  SUBCASE("density mode sits at one third") {
    // argmax by golden-ish scan plus finite differences
    double best_t = 0.0, best = -1.0;
    for (double t = 0.05; t < 2.0; t += 1e-4) {
      const double v = inv_gamma2_density(t);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    CHECK(best_t == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  }
  SUBCASE("cdf endpoints and derivative") {
    CHECK(inv_gamma2_cdf(1e-10) == doctest::Approx(0.0));
    CHECK(inv_gamma2_cdf(1e10) == doctest::Approx(1.0));
    for (double t : {0.2, 1.0, 5.0}) {
      const double h = 1e-6 * t;
      const double fd = (inv_gamma2_cdf(t + h) - inv_gamma2_cdf(t - h)) / (2.0 * h);
      CHECK(fd == doctest::Approx(inv_gamma2_density(t)).epsilon(1e-6));
    }
  }
}

TEST_CASE("finite-N beta-inverse law") {
  CHECK(beta_inv_finite_n_density(10, 0.05) == 0.0);  // below 1/N
  CHECK(beta_inv_finite_n_cdf(10, 0.05) == 0.0);
  SUBCASE("pointwise convergence to the inverse gamma-2 density") {
    const int n = 1'000'000;
    for (double t : {0.3, 1.0, 4.0})
      CHECK(beta_inv_finite_n_density(n, t) ==
            doctest::Approx(inv_gamma2_density(t)).epsilon(1e-4));
  }
  SUBCASE("cdf is consistent with the density") {
    for (double t : {0.15, 0.9, 3.0}) {
      const double h = 1e-6;
      const double fd = (beta_inv_finite_n_cdf(10, t + h) - beta_inv_finite_n_cdf(10, t - h)) /
                        (2.0 * h);
      CHECK(fd == doctest::Approx(beta_inv_finite_n_density(10, t)).epsilon(1e-5));
    }
  }
}

TEST_CASE("angle limit law") {
  CHECK(angle_limit_density(1e-9) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(angle_limit_density(1e4) == doctest::Approx(1e-8).epsilon(1e-3));
  CHECK(angle_limit_cdf(1e9) == doctest::Approx(1.0));
  for (double t : {0.1, 1.0, 6.0}) {
    const double h = 1e-6;
    const double fd = (angle_limit_cdf(t + h) - angle_limit_cdf(t - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(angle_limit_density(t)).epsilon(1e-5));
  }
}

TEST_CASE("frechet heuristic cdf") {
  CHECK(frechet_cdf(1e9) == doctest::Approx(1.0));
  CHECK(frechet_cdf(1.0 / std::sqrt(6.0)) == doctest::Approx(std::exp(-1.0)));
  double prev = 0.0;
  for (double y = 0.05; y < 5.0; y += 0.05) {
    const double v = frechet_cdf(y);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("ginibre kernel") {
  SUBCASE("diagonal positivity and bulk limit") {
    for (double r : {0.0, 0.2, 0.5, 0.9, 1.1})
      CHECK(ginibre_kernel(50, r, r).real() >= 0.0);
    CHECK(ginibre_kernel(200, 0.3, 0.3).real() ==
          doctest::Approx(200.0 / 3.14159265358979324).epsilon(1e-10));
  }
  SUBCASE("off-diagonal matches a direct small-N sum") {
    const int n = 6;
    const Complex z(0.4, 0.1), w(-0.2, 0.3);
    Complex direct = 0.0;
    Complex term = 1.0;
    for (int k = 0; k < n; ++k) {
      direct += term;
      term *= static_cast<double>(n) * z * std::conj(w) / (k + 1.0);
    }
    direct *= n / 3.14159265358979324 *
              std::exp(-0.5 * n * (std::norm(z) + std::norm(w)));
    const Complex v = ginibre_kernel(n, z, w);
    CHECK(std::abs(v - direct) <= 1e-12 * std::abs(direct));
  }
  SUBCASE("hermitian symmetry") {
    const Complex z(0.4, 0.1), w(-0.2, 0.3);
    const Complex a = ginibre_kernel(30, z, w);
    const Complex b = ginibre_kernel(30, w, z);
    CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("u coefficients and the recurrence pair") {
  CHECK(u_coeff(0, 2.0) == doctest::Approx(1.0 - 0.5 / 3.0));
  // The recurrence holds on both geometry branches with the same delta.
  const PairGeometry g = PairGeometry::from_delta(1.3);
  for (const double x : {g.a, g.b})
    for (int k = 1; k <= 30; ++k) {
      const double lhs = u_coeff(k, x);
      const double rhs =
          recurrence_m1(k, x) * u_coeff(k - 1, x) - recurrence_m2(k, x) * u_coeff(k - 2, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}
