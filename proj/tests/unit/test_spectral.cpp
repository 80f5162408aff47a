#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gin/ensembles.hpp"
#include "gin/errors.hpp"
#include "gin/spectral.hpp"

using namespace gin;

namespace {

ComplexMatrix ginibre(int n, std::uint64_t seed, std::uint64_t stream = 0) {
  RngStream rng(seed, stream);
  return sample_matrix({EnsembleKind::complex_gaussian, n, 0.0}, rng);
}

}  // namespace

TEST_CASE("diagonal input decomposes to the identity eigenbasis") {
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = 1.0;
  g(1, 1) = Complex(0.0, 2.0);
  const auto [sp, sys] = eigendecompose(g);
  // (Re, Im) order puts 2i first.
  CHECK(sp.eigenvalues[0] == Complex(0.0, 2.0));
  CHECK(sp.eigenvalues[1] == Complex(1.0, 0.0));
  CHECK(sp.min_gap == doctest::Approx(std::sqrt(5.0)));
  // Columns are unit coordinate vectors up to phase; overlaps are exactly 1.
  const OverlapMatrix o = overlaps(sys.X, sys.Y);
  CHECK(o.diag(0) == doctest::Approx(1.0));
  CHECK(o.diag(1) == doctest::Approx(1.0));
  CHECK(std::abs(o.O(0, 1)) < 1e-14);
}

TEST_CASE("near-Jordan input is rejected as degenerate") {
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 1) = 1.0;
  g(1, 1) = 1e-15;
  CHECK_THROWS_AS(eigendecompose(g), DegenerateSpectrum);
}

TEST_CASE("non-finite input is refused") {
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eigendecompose(g), ConfigInvalid);
}

TEST_CASE("random draw decomposes with small residual and biorthogonal basis") {
  const auto g = ginibre(50, 21);
  const auto [sp, sys] = eigendecompose(g);
  CHECK(sys.residual_bound < 1e-10);
  const ComplexMatrix yx = sys.Y * sys.X - ComplexMatrix::Identity(50, 50);
  CHECK(yx.cwiseAbs().maxCoeff() < 1e-10);
  // Eigenvalues come out sorted lexicographically.
  for (std::size_t i = 1; i < sp.eigenvalues.size(); ++i) {
    const auto a = sp.eigenvalues[i - 1];
    const auto b = sp.eigenvalues[i];
    CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
  }
}

TEST_CASE("both backend paths satisfy the same contract") {
  // Below and above the LAPACK threshold.
  for (int n : {40, 80}) {
    const auto g = ginibre(n, 22, static_cast<std::uint64_t>(n));
    const auto [sp, sys] = eigendecompose(g);
    CHECK(sys.residual_bound < 1e-10);
    const OverlapMatrix o = overlaps(sys.X, sys.Y);
    for (int i = 0; i < n; ++i) CHECK(o.diag(i) >= 1.0 - 1e-8);
  }
}

TEST_CASE("two-by-two schur form has the textbook diagonal overlap") {
  // O_11 = 1 + |t|^2 / |l1 - l2|^2 for [[l1, t], [0, l2]].
  const Complex l1(0.0, 0.0), l2(1.0, 0.0), t(1.3, -0.4);
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = l1;
  g(0, 1) = t;
  g(1, 1) = l2;
  const auto [sp, sys] = eigendecompose(g);
  const OverlapMatrix o = overlaps(sys.X, sys.Y);
  const double expected = 1.0 + std::norm(t) / std::norm(l1 - l2);
  const int i1 = std::abs(sp.eigenvalues[0] - l1) < 0.5 ? 0 : 1;
  CHECK(o.diag(i1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(o.diag(1 - i1) == doctest::Approx(expected).epsilon(1e-12));  // row sums force it
}

TEST_CASE("condition numbers are square roots of the diagonal") {
  const auto g = ginibre(20, 23);
  const auto [sp, sys] = eigendecompose(g);
  const OverlapMatrix o = overlaps(sys.X, sys.Y);
  const auto k = condition_numbers(o);
  for (int i = 0; i < 20; ++i) {
    CHECK(k[static_cast<std::size_t>(i)] == doctest::Approx(std::sqrt(o.diag(i))));
    CHECK(k[static_cast<std::size_t>(i)] >= 1.0 - 1e-10);
  }
  SUBCASE("hand values") {
    OverlapMatrix m;
    m.O = ComplexMatrix::Identity(2, 2);
    m.O(1, 1) = 4.0;
    const auto kk = condition_numbers(m);
    CHECK(kk[0] == doctest::Approx(1.0));
    CHECK(kk[1] == doctest::Approx(2.0));
  }
}

TEST_CASE("overlap row sums equal one") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto g = ginibre(30, 24, s);
    const auto [sp, sys] = eigendecompose(g);
    const OverlapMatrix o = overlaps(sys.X, sys.Y);
    const double scale = o.O.cwiseAbs().maxCoeff();
    for (int i = 0; i < 30; ++i) {
      Complex row = 0.0;
      for (int j = 0; j < 30; ++j) row += o.O(i, j);
      CHECK(std::abs(row - 1.0) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("overlaps are invariant under the biorthogonal rescaling") {
  const auto g = ginibre(20, 25);
  const auto [sp, sys] = eigendecompose(g);
  const OverlapMatrix base = overlaps(sys.X, sys.Y);
  RngStream rng(99, 0);
  ComplexMatrix xs = sys.X;
  ComplexMatrix ys = sys.Y;
  for (int i = 0; i < 20; ++i) {
    const Complex c = rng.complex_normal() + Complex(2.0, 0.0);  // bounded away from 0
    xs.col(i) *= c;
    ys.row(i) /= c;
  }
  const OverlapMatrix scaled = overlaps(xs, ys);
  const double diff = (scaled.O - base.O).cwiseAbs().maxCoeff();
  CHECK(diff <= 1e-10 * base.O.cwiseAbs().maxCoeff());
}

TEST_CASE("overlaps are invariant under unitary conjugation") {
  const int n = 30;
  const auto g = ginibre(n, 26);
  // Haar unitary from the QR of a gaussian draw with phase fixing.
  const auto raw = ginibre(n, 27);
  Eigen::HouseholderQR<ComplexMatrix> qr(raw);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));

  const auto [sp1, sys1] = eigendecompose(g);
  const auto [sp2, sys2] = eigendecompose(ComplexMatrix(q.adjoint() * g * q));
  const OverlapMatrix o1 = overlaps(sys1.X, sys1.Y);
  const OverlapMatrix o2 = overlaps(sys2.X, sys2.Y);
  // Match eigenvalues pairwise (sorted order can differ by tiny perturbations).
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = 1e300;
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(sp1.eigenvalues[static_cast<std::size_t>(i)] -
                                sp2.eigenvalues[static_cast<std::size_t>(j)]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    CHECK(bd < 1e-8);
    CHECK(o2.diag(best) == doctest::Approx(o1.diag(i)).epsilon(1e-6));
  }
}

TEST_CASE("gram-product overlaps agree with the definition") {
  const auto g = ginibre(12, 28);
  const auto [sp, sys] = eigendecompose(g);
  const OverlapMatrix o = overlaps(sys.X, sys.Y);
  for (int i = 0; i < 12; i += 3)
    for (int j = 0; j < 12; j += 4) {
      const Complex direct = (sys.X.col(j).adjoint() * sys.X.col(i)).value() *
                             (sys.Y.row(j).conjugate() * sys.Y.row(i).transpose()).value();
      CHECK(std::abs(o.O(i, j) - direct) < 1e-10 * std::abs(direct) + 1e-12);
    }
  const auto d = diag_overlaps(sys.X, sys.Y);
  for (int i = 0; i < 12; ++i)
    CHECK(d[static_cast<std::size_t>(i)] == doctest::Approx(o.diag(i)).epsilon(1e-12));
}
