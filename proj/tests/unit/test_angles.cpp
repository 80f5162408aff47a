#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gin/angles.hpp"
#include "gin/ensembles.hpp"
#include "gin/errors.hpp"
#include "gin/estimators.hpp"
#include "gin/spectral.hpp"

using namespace gin;

TEST_CASE("eigenvector angle basics") {
  ComplexMatrix x(2, 2);
  x << Complex(1.0, 0.0), Complex(0.0, 2.0),
       Complex(0.0, 0.0), Complex(1.0, 0.0);
  CHECK(std::abs(eigenvector_angle(x, 0, 0)) == doctest::Approx(1.0));
  ComplexMatrix ortho(2, 2);
  ortho << 1.0, 0.0,
           0.0, 3.0;
  CHECK(std::abs(eigenvector_angle(ortho, 0, 1)) == doctest::Approx(0.0));
}

TEST_CASE("two-by-two schur angle modulus") {
  const Complex l1(0.0, 0.0), l2(0.7, -0.2), t(0.9, 0.4);
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = l1;
  g(0, 1) = t;
  g(1, 1) = l2;
  const auto [sp, sys] = eigendecompose(g);
  const double b2 = std::abs(t) / std::abs(l1 - l2);
  const double expected = b2 / std::sqrt(1.0 + b2 * b2);
  CHECK(std::abs(eigenvector_angle(sys.X, 0, 1)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("phi map and its inverse") {
  CHECK(phi_map(0.0) == Complex(0.0));
  CHECK(std::abs(phi_map(1.0) - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
  RngStream rng(81, 0);
  for (int i = 0; i < 200; ++i) {
    const Complex z = 3.0 * rng.complex_normal();
    CHECK(std::abs(phi_map(z)) < 1.0);
    CHECK(std::abs(phi_inverse(phi_map(z)) - z) <= 1e-12 * (1.0 + std::abs(z)));
  }
  CHECK_THROWS_AS(phi_inverse(Complex(1.0, 0.0)), ConfigInvalid);
}

TEST_CASE("unit phases rotate the angle but keep its modulus") {
  RngStream rng(82, 0);
  ComplexMatrix x(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) x(i, j) = rng.complex_normal();
  const Complex before = eigenvector_angle(x, 1, 2);
  const double theta = 1.234;
  x.col(2) *= std::polar(1.0, theta);
  const Complex after = eigenvector_angle(x, 1, 2);
  CHECK(std::abs(after) == doctest::Approx(std::abs(before)).epsilon(1e-14));
  CHECK(std::arg(after / before) == doctest::Approx(theta).epsilon(1e-10));
}

TEST_CASE("microscopic law self-test from the stated distribution") {
  RngStream rng(83, 0);
  std::vector<AngleSample> samples(100'000);
  for (auto& s : samples) {
    const double omega = 1.0 + rng.uniform();
    s.omega = omega;
    s.value = phi_map(rng.complex_normal() / omega);
  }
  const KsReport r = angle_distribution_test(samples, 1.0);
  CHECK(r.distance < ks_critical_value(r.n, 0.01));
}

TEST_CASE("at-origin law") {
  const int n = 200;
  RngStream rng(84, 0);
  std::vector<double> samples(100'000);
  for (auto& s : samples) {
    const int u = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
    const double e = rng.exponential();
    s = n * e / (e + rng.gamma_int(static_cast<std::uint64_t>(u)));
  }
  SUBCASE("finite-N reference") {
    const KsReport r = angle_origin_test(samples, n, 0.01);
    CHECK(r.pass);
  }
  SUBCASE("continuum reference at this N is already close") {
    const KsReport r = angle_origin_test(samples, 0, 0.02);
    CHECK(r.pass);
  }
  SUBCASE("reference cdf is a genuine distribution function") {
    double prev = 0.0;
    for (double t = 0.0; t < 250.0; t += 0.5) {
      const double v = angle_origin_cdf(n, t);
      CHECK(v >= prev - 1e-15);
      CHECK(v <= 1.0 + 1e-15);
      prev = v;
    }
    CHECK(angle_origin_cdf(n, 0.0) == 0.0);
    CHECK(angle_origin_cdf(n, static_cast<double>(n)) == doctest::Approx(1.0));
  }
}

TEST_CASE("mesoscopic separations force near-orthogonality") {
  RngStream rng(85, 0);
  const double omega = 10.0;
  std::vector<double> sq(20'000);
  for (auto& s : sq) s = std::norm(phi_map(rng.complex_normal() / omega));
  std::sort(sq.begin(), sq.end());
  const double median = sq[sq.size() / 2];
  CHECK(median < 2.0 * std::log(2.0) / (omega * omega));
}

TEST_CASE("insufficient samples are rejected") {
  std::vector<AngleSample> few(10);
  for (auto& s : few) {
    s.omega = 1.0;
    s.value = 0.1;
  }
  CHECK_THROWS_AS(angle_distribution_test(few, 0.05), InsufficientSamples);
}
