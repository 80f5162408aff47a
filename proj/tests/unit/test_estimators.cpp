#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gin/errors.hpp"
#include "gin/estimators.hpp"
#include "gin/oracle.hpp"
#include "gin/rng.hpp"

using namespace gin;

TEST_CASE("compensated sums merge exactly") {
  RngStream rng(41, 0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = rng.normal() * std::pow(10.0, 8.0 * rng.uniform() - 4.0);
  CompensatedSum whole;
  CompensatedSum a, b;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    whole.add(xs[i]);
    (i % 2 ? a : b).add(xs[i]);
  }
  CompensatedSum merged = a;
  merged.merge(b);
  CHECK(std::abs(merged.value() - whole.value()) <=
        1e-12 * std::max(1.0, std::abs(whole.value())));
}

TEST_CASE("diagonal window accumulator") {
  const DiskWindow w = DiskWindow::microscopic(Complex(0.5, 0.0), 100, 0.3);
  CHECK(w.radius == doctest::Approx(0.03));
  DiagWindowAccumulator acc(w, 100);
  CHECK_THROWS_AS(acc.estimate(), EmptyWindow);

  acc.add(Complex(0.51, 0.0), 80.0);   // inside
  acc.add(Complex(0.9, 0.0), 999.0);   // outside
  const auto e1 = acc.estimate();
  CHECK(e1.count == 1);
  CHECK(e1.mean == doctest::Approx(80.0));
  CHECK_FALSE(e1.std_error.has_value());  // a single sample has no spread

  acc.add(Complex(0.49, 0.01), 120.0);
  const auto e2 = acc.estimate();
  CHECK(e2.count == 2);
  CHECK(e2.mean == doctest::Approx(100.0));
  CHECK(e2.std_error.has_value());

  SUBCASE("merge equals concatenation") {
    DiagWindowAccumulator left(w, 100), right(w, 100), whole(w, 100);
    RngStream rng(42, 0);
    for (int i = 0; i < 400; ++i) {
      const Complex l = w.center + Complex(0.02 * (rng.uniform() - 0.5),
                                           0.02 * (rng.uniform() - 0.5));
      const double o = 50.0 + 100.0 * rng.uniform();
      whole.add(l, o);
      (i % 3 == 0 ? left : right).add(l, o);
    }
    DiagWindowAccumulator merged = left;
    merged.merge(right);
    CHECK(merged.count() == whole.count());
    CHECK(merged.estimate().mean ==
          doctest::Approx(whole.estimate().mean).epsilon(1e-12));
  }
}

TEST_CASE("ks distance") {
  SUBCASE("samples from their own cdf stay under the critical value") {
    RngStream rng(43, 0);
    std::vector<double> u(100'000);
    for (auto& x : u) x = rng.uniform();
    std::sort(u.begin(), u.end());
    const double d = ks_distance(u, [](double t) { return std::clamp(t, 0.0, 1.0); });
    CHECK(d < ks_critical_value(static_cast<long>(u.size()), 0.01));
  }
  SUBCASE("point mass against its own step is zero") {
    const std::vector<double> s(50, 2.5);
    const double d = ks_distance(s, [](double t) { return t >= 2.5 ? 1.0 : 0.0; });
    CHECK(d == doctest::Approx(0.0));
  }
  SUBCASE("a shift shows up as roughly the shift size") {
    RngStream rng(43, 1);
    std::vector<double> u(50'000);
    for (auto& x : u) x = rng.uniform() + 0.1;
    std::sort(u.begin(), u.end());
    const double d = ks_distance(u, [](double t) { return std::clamp(t, 0.0, 1.0); });
    CHECK(d == doctest::Approx(0.1).epsilon(0.1));
  }
  SUBCASE("bounded by one and needs data") {
    const std::vector<double> s{1e10};
    CHECK(ks_distance(s, [](double) { return 0.0; }) <= 1.0);
    CHECK_THROWS_AS(ks_distance({}, [](double) { return 0.0; }), InsufficientSamples);
  }
  SUBCASE("critical value constant") {
    CHECK(ks_critical_value(10'000, 0.01) == doctest::Approx(1.6276 / 100.0).epsilon(1e-3));
  }
}

TEST_CASE("two-sample ks") {
  RngStream rng(44, 0);
  std::vector<double> a(20'000), b(20'000), c(20'000);
  for (auto& x : a) x = rng.normal();
  for (auto& x : b) x = rng.normal();
  for (auto& x : c) x = rng.normal() + 0.5;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::sort(c.begin(), c.end());
  CHECK(ks_two_sample(a, b) < 1.628 * std::sqrt(2.0 / 20'000));
  CHECK(ks_two_sample(a, c) > 0.15);  // half-sigma shift is ~0.197 in sup norm
}

TEST_CASE("pseudospectrum volume") {
  const std::vector<Complex> ev{Complex(0.1, 0.0), Complex(0.0, 0.15), Complex(0.8, 0.0)};
  const std::vector<double> diag{100.0, 150.0, 900.0};
  const DiskWindow ball{Complex(0.0, 0.0), 0.3};
  const double eps = 1e-4;
  const auto v = pseudospectrum_volume(ev, diag, ball, eps, 500);
  SUBCASE("empirical sum is the exact overlap sum") {
    const double pi = 3.14159265358979324;
    CHECK(v.empirical == doctest::Approx(pi * (100.0 + 150.0) * eps * eps));
    CHECK(v.eigenvalues_in_ball == 2);
  }
  SUBCASE("epsilon scaling is exactly quadratic") {
    const auto v2 = pseudospectrum_volume(ev, diag, ball, 2.0 * eps, 500);
    CHECK(v2.empirical == doctest::Approx(4.0 * v.empirical));
    CHECK(v2.predicted == doctest::Approx(4.0 * v.predicted));
  }
  SUBCASE("empty ball gives zero") {
    const DiskWindow far{Complex(10.0, 0.0), 0.1};
    const auto v3 = pseudospectrum_volume(ev, diag, far, eps, 500);
    CHECK(v3.empirical == 0.0);
    CHECK(v3.eigenvalues_in_ball == 0);
  }
}

TEST_CASE("closed-form disk integral of 1-|z|^2 matches quadrature") {
  const Complex c(0.3, -0.2);
  const double r = 0.4;
  const double closed = disk_one_minus_sq_integral(c, r);
  const Complex quad = disk_integral(
      [&](Complex w) { return Complex(1.0 - std::norm(c + w)); }, {0.0, r}, {}, 1e-10);
  CHECK(closed == doctest::Approx(quad.real()).epsilon(1e-9));
}

TEST_CASE("extremes scan") {
  const std::vector<Complex> ev{Complex(0.1, 0.0), Complex(0.5, 0.2), Complex(0.95, 0.0)};
  const std::vector<double> diag{400.0, 90.0, 5000.0};
  SUBCASE("empty region leaves flags vacuously false") {
    const auto r = extremes_scan(ev, diag, {{2.0, 3.0}}, 100, 0.2, 0.2);
    CHECK(r.count == 0);
    CHECK_FALSE(r.lower_violated);
    CHECK_FALSE(r.upper_violated);
  }
  SUBCASE("violations are flagged against the exponent bounds") {
    // Bulk region covers the first two; N^{1-0.2} = 100^{0.8} ~ 39.8 so the
    // 90 entry passes; with eps_lower = 0 the bound is 100 and it violates.
    const auto ok = extremes_scan(ev, diag, {{0.0, 0.8}}, 100, 0.2, 10.0);
    CHECK(ok.count == 2);
    CHECK(ok.min_diag == doctest::Approx(90.0));
    CHECK_FALSE(ok.lower_violated);
    const auto bad = extremes_scan(ev, diag, {{0.0, 0.8}}, 100, 0.0, 10.0);
    CHECK(bad.lower_violated);
    // Upper bound N^{1.5+0} = 1000 is beaten by 5000 once the region reaches it.
    const auto up = extremes_scan(ev, diag, {{0.0, 1.0}}, 100, 0.2, 0.0);
    CHECK(up.upper_violated);
  }
}

TEST_CASE("pair window accumulator") {
  // Two eigenvalues at separation omega = 1.5 (N = 100), both near 0.
  const int n = 100;
  std::vector<Complex> ev{Complex(0.0, 0.0), Complex(0.15, 0.0), Complex(0.9, 0.0)};
  ComplexMatrix o = ComplexMatrix::Zero(3, 3);
  o(0, 0) = 5.0;
  o(1, 1) = 7.0;
  o(2, 2) = 2.0;
  o(0, 1) = Complex(-2.0, 0.5);
  o(1, 0) = Complex(-2.0, -0.5);
  PairWindow w{Complex(0.0, 0.0), Complex(0.0, 0.0), 0.5, 1.0, 2.0};
  PairWindowAccumulator acc(w, n);
  acc.add_matrix(ev, o);
  // Ordered pairs (0,1) and (1,0) are in band; anything with index 2 is out of
  // the disk radius or the band.
  CHECK(acc.count() == 2);
  const auto m12 = acc.mean_o12();
  CHECK(m12.mean.real() == doctest::Approx(-2.0));
  CHECK(m12.mean.imag() == doctest::Approx(0.0));  // conjugate pair averages out
  CHECK(acc.mean_o11_o22().mean == doctest::Approx(35.0));
  CHECK(acc.mean_abs_o12_sq().mean == doctest::Approx(4.25));
  CHECK(acc.per_matrix_counts().size() == 1);

  PairWindowAccumulator empty(w, n);
  CHECK_THROWS_AS(empty.mean_o12(), EmptyWindow);
}
