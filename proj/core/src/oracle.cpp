#include "gin/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "gin/errors.hpp"
#include "gin/formulas.hpp"

namespace gin {
namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 2.0 * kPi;

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu_0 * (first eigenvector component)^2.
void golub_welsch(const std::vector<double>& diag, const std::vector<double>& offdiag,
                  double mu0, std::vector<double>& nodes, std::vector<double>& weights) {
  const int m = static_cast<int>(diag.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    j(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < m) {
      j(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
      j(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(static_cast<std::size_t>(m));
  weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
}

struct Arc {
  double lo = 0.0;
  double hi = 0.0;
};

// Angular arcs of the circle of radius r (centered at origin) that survive
// the exclusion disks.
std::vector<Arc> allowed_arcs(double r, const std::vector<ExclusionDisk>& excluded) {
  std::vector<Arc> blocked;
  for (const auto& ex : excluded) {
    const double c = std::abs(ex.center);
    if (ex.radius <= 0.0) continue;
    if (c < 1e-300) {
      if (r < ex.radius) return {};  // whole circle swallowed
      continue;
    }
    // |r e^{i t} - c e^{i p}| < rho  <=>  cos(t - p) > (r^2 + c^2 - rho^2)/(2 r c)
    const double cosv = (r * r + c * c - ex.radius * ex.radius) / (2.0 * r * c);
    if (cosv >= 1.0) continue;           // circle misses the disk
    if (cosv <= -1.0) return {};         // circle inside the disk
    const double half = std::acos(cosv);
    const double p = std::arg(ex.center);
    blocked.push_back({p - half, p + half});
  }
  if (blocked.empty()) return {{0.0, kTwoPi}};
  // Normalize blocked arcs into [0, 2pi) and subtract from the full circle.
  std::vector<Arc> norm;
  for (auto& b : blocked) {
    double lo = std::fmod(b.lo, kTwoPi);
    double hi = std::fmod(b.hi, kTwoPi);
    if (lo < 0.0) lo += kTwoPi;
    if (hi < 0.0) hi += kTwoPi;
    if (lo <= hi)
      norm.push_back({lo, hi});
    else {
      norm.push_back({lo, kTwoPi});
      norm.push_back({0.0, hi});
    }
  }
  std::sort(norm.begin(), norm.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  std::vector<Arc> merged;
  for (const auto& a : norm) {
    if (!merged.empty() && a.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, a.hi);
    else
      merged.push_back(a);
  }
  std::vector<Arc> out;
  double cursor = 0.0;
  for (const auto& b : merged) {
    if (b.lo > cursor) out.push_back({cursor, b.lo});
    cursor = std::max(cursor, b.hi);
  }
  if (cursor < kTwoPi) out.push_back({cursor, kTwoPi});
  return out;
}

// 7/15-point Gauss-Legendre pair for adaptive panels.
struct GlPair {
  std::vector<double> n7, w7, n15, w15;
  GlPair() {
    gauss_legendre(7, n7, w7);
    gauss_legendre(15, n15, w15);
  }
};

const GlPair& gl_pair() {
  static const GlPair p;
  return p;
}

Complex gl_apply(const std::function<Complex(double)>& f, double a, double b,
                 const std::vector<double>& nodes, const std::vector<double>& weights) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Complex acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    acc += weights[i] * f(mid + half * nodes[i]);
  return half * acc;
}

// Panel-budgeted 7/15 refinement: unreachable tolerances exhaust the budget
// and surface through err_out instead of an exponential panel explosion.
Complex adaptive_gl(const std::function<Complex(double)>& f, double a, double b,
                    double tol, int depth, double& err_out, long& budget) {
  const auto& p = gl_pair();
  const Complex coarse = gl_apply(f, a, b, p.n7, p.w7);
  const Complex fine = gl_apply(f, a, b, p.n15, p.w15);
  const double err = std::abs(fine - coarse);
  --budget;
  if (err <= tol || depth <= 0 || budget <= 0) {
    err_out += err;
    return fine;
  }
  const double mid = 0.5 * (a + b);
  return adaptive_gl(f, a, mid, tol * 0.5, depth - 1, err_out, budget) +
         adaptive_gl(f, mid, b, tol * 0.5, depth - 1, err_out, budget);
}

Complex adaptive_gl(const std::function<Complex(double)>& f, double a, double b,
                    double tol, int depth, double& err_out) {
  long budget = 4000;
  return adaptive_gl(f, a, b, tol, depth, err_out, budget);
}

}  // namespace

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  std::vector<double> d(static_cast<std::size_t>(m), 0.0);
  std::vector<double> e(static_cast<std::size_t>(m > 0 ? m - 1 : 0));
  for (int i = 1; i < m; ++i)
    e[static_cast<std::size_t>(i - 1)] = i / std::sqrt(4.0 * i * i - 1.0);
  golub_welsch(d, e, 2.0, nodes, weights);
}

void gauss_laguerre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  std::vector<double> d(static_cast<std::size_t>(m));
  std::vector<double> e(static_cast<std::size_t>(m > 0 ? m - 1 : 0));
  for (int i = 0; i < m; ++i) d[static_cast<std::size_t>(i)] = 2.0 * i + 1.0;
  for (int i = 1; i < m; ++i) e[static_cast<std::size_t>(i - 1)] = static_cast<double>(i);
  golub_welsch(d, e, 1.0, nodes, weights);
}

Complex tridiag_det(const TridiagonalSpec& spec) {
  const std::size_t k = spec.diag.size();
  if (spec.sub.size() + 1 != std::max<std::size_t>(k, 1) ||
      spec.super.size() + 1 != std::max<std::size_t>(k, 1))
    throw ConfigInvalid("tridiagonal spec has inconsistent lengths");
  // d_{k-2} and d_{k-1} carry separate base-2 exponents: their ratio can
  // exceed the double range even when every d_k is representable. Each update
  // is assembled in the scale of its dominating term; the other term saturates
  // to zero once it sits more than ~300 decimal digits below.
  const auto normalize = [](Complex& v, long& e) {
    const double m = std::abs(v);
    if (m == 0.0 || (m > 0x1p-64 && m < 0x1p+64)) return;
    int ve = 0;
    std::frexp(m, &ve);
    v = Complex(std::ldexp(v.real(), -ve), std::ldexp(v.imag(), -ve));
    e += ve;
  };
  const auto shift = [](long d) {  // saturating 2^d
    return std::ldexp(1.0, static_cast<int>(std::clamp<long>(d, -1100, 1100)));
  };
  Complex prev = 1.0;
  long ep = 0;
  Complex cur = k > 0 ? spec.diag[0] : Complex(1.0);
  long ec = 0;
  for (std::size_t i = 1; i < k; ++i) {
    normalize(cur, ec);
    normalize(prev, ep);
    const Complex t1 = spec.diag[i] * cur;                         // at scale ec
    const Complex t2 = spec.sub[i - 1] * spec.super[i - 1] * prev;  // at scale ep
    long en = ec;
    if (t1 == Complex(0.0) && t2 != Complex(0.0)) {
      en = ep;
    } else if (t1 != Complex(0.0) && t2 != Complex(0.0)) {
      const double l1 = std::log2(std::abs(t1)) + static_cast<double>(ec);
      const double l2 = std::log2(std::abs(t2)) + static_cast<double>(ep);
      en = l1 >= l2 ? ec : ep;
    }
    const Complex next = t1 * shift(ec - en) - t2 * shift(ep - en);
    prev = cur;
    ep = ec;
    cur = next;
    ec = en;
  }
  return Complex(std::ldexp(cur.real(), static_cast<int>(std::clamp<long>(ec, -2000, 2000))),
                 std::ldexp(cur.imag(), static_cast<int>(std::clamp<long>(ec, -2000, 2000))));
}

Complex dense_det(const ComplexMatrix& m) { return m.determinant(); }

AkCheck verify_ak_closed_form(AkFamily family, int k, double x) {
  // With the dimension parameter set to 1 the stated matrix entries lose
  // their power-of-N scaling, so the scaled sequence is the determinant
  // itself: entries at unit dimension with z = sqrt(x).
  const double z = std::sqrt(x);
  TridiagonalSpec spec;
  spec.diag.resize(static_cast<std::size_t>(k));
  spec.sub.resize(static_cast<std::size_t>(k > 0 ? k - 1 : 0));
  spec.super.resize(static_cast<std::size_t>(k > 0 ? k - 1 : 0));
  for (int i = 1; i <= k; ++i) {
    double dii = 0.0;
    switch (family) {
      case AkFamily::plain:
        dii = 1.0 + x / i;
        break;
      case AkFamily::diag_mean:
        dii = 1.0 + (x + 1.0) / i;
        break;
      case AkFamily::offdiag_mean:
        dii = 1.0 + (x + 1.0) / (i + 1.0);
        break;
    }
    spec.diag[static_cast<std::size_t>(i - 1)] = dii;
    if (i < k) {
      spec.super[static_cast<std::size_t>(i - 1)] = -z;
      spec.sub[static_cast<std::size_t>(i - 1)] = -z / (i + 1.0);  // entry (i+1, i)
    }
  }
  AkCheck out;
  out.recurrence = tridiag_det(spec).real();
  switch (family) {
    case AkFamily::plain:
      out.closed_form = exp_partial_sum(0, k, x);
      break;
    case AkFamily::diag_mean:
      out.closed_form = (k + 1.0) * exp_partial_sum(0, k + 1, x) - x * exp_partial_sum(0, k, x);
      break;
    case AkFamily::offdiag_mean:
      out.closed_form = (k + 2.0) * exp_partial_sum(2, k + 2, x) / (x * x);
      break;
  }
  out.rel_error = std::abs(out.recurrence - out.closed_form) /
                  std::max(1e-300, std::abs(out.closed_form));
  return out;
}

GaussianDiskRule::GaussianDiskRule(int n, int radial_nodes, int angular_nodes)
    : angular_(angular_nodes) {
  std::vector<double> t, w;
  gauss_laguerre(radial_nodes, t, w);
  radius_.resize(t.size());
  weight_ = w;
  for (std::size_t i = 0; i < t.size(); ++i) radius_[i] = std::sqrt(t[i] / n);
}

Complex GaussianDiskRule::integrate(const std::function<Complex(Complex)>& f) const {
  // Midpoint angular rule: spectrally accurate for periodic integrands and
  // keeps nodes off the axes where conditioning points usually sit.
  Complex acc = 0.0;
  for (std::size_t i = 0; i < radius_.size(); ++i) {
    Complex ring = 0.0;
    for (int j = 0; j < angular_; ++j) {
      const double th = kTwoPi * (j + 0.5) / angular_;
      ring += f(radius_[i] * Complex(std::cos(th), std::sin(th)));
    }
    acc += weight_[i] * ring / static_cast<double>(angular_);
  }
  return acc;
}

Complex disk_integral(const std::function<Complex(Complex)>& f, const DiskDomain& domain,
                      const std::vector<ExclusionDisk>& excluded, double tol,
                      double* error_estimate) {
  if (domain.r_hi <= domain.r_lo) throw ConfigInvalid("empty radial domain");

  const auto ring_integral = [&](double r) -> Complex {
    Complex acc = 0.0;
    double err = 0.0;
    for (const Arc& arc : allowed_arcs(r, excluded)) {
      const auto g = [&](double th) { return f(r * Complex(std::cos(th), std::sin(th))); };
      // Angular tolerance is relative to the ring scale; the outer radial
      // adaption absorbs what is left. The per-ring budget keeps pathological
      // integrands from exploding the total node count.
      long budget = 400;
      acc += adaptive_gl(g, arc.lo, arc.hi, tol * 1e-2, 20, err, budget);
    }
    return acc * r;
  };

  // Panel boundaries at radii where exclusion arcs switch on or off; the
  // integrand is smooth in between.
  std::vector<double> cuts = {domain.r_lo, domain.r_hi};
  for (const auto& ex : excluded) {
    const double c = std::abs(ex.center);
    for (double r : {c - ex.radius, c + ex.radius})
      if (r > domain.r_lo && r < domain.r_hi) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());

  Complex total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-15) continue;
    long budget = 300;
    total += adaptive_gl(ring_integral, cuts[i], cuts[i + 1],
                         tol / static_cast<double>(cuts.size()), 20, err, budget);
  }
  if (error_estimate) *error_estimate = err;
  if (err > tol) throw ToleranceNotReached("disk integral error " + std::to_string(err));
  return total;
}

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol) {
  double err = 0.0;
  const Complex v = adaptive_gl([&](double x) { return Complex(f(x)); }, a, b, tol, 30, err);
  if (err > tol) throw ToleranceNotReached("1-d integral error " + std::to_string(err));
  return v.real();
}

double andreief_product_expectation(const std::function<double(Complex)>& g, int n,
                                    MomentConditioning conditioning, Complex z,
                                    int radial_nodes, int angular_nodes) {
  if (n < 1 || n > 6) throw ConfigInvalid("moment-matrix oracle supports 1 <= n <= 6");
  const GaussianDiskRule rule(n, radial_nodes, angular_nodes);

  int k = n;  // moment matrix dimension
  if (conditioning == MomentConditioning::origin) k = n - 1;
  if (conditioning == MomentConditioning::origin_and_z) k = n - 2;
  if (k < 1) throw ConfigInvalid("conditioning leaves no free eigenvalue");

  ComplexMatrix f(k, k);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) {
      const auto integrand = [&](Complex l) -> Complex {
        Complex base = std::pow(l, i - 1) * std::pow(std::conj(l), j - 1) * g(l);
        if (conditioning == MomentConditioning::origin) base *= std::norm(l);
        if (conditioning == MomentConditioning::origin_and_z)
          base *= std::norm(l) * std::norm(z - l);
        return base;
      };
      f(i - 1, j - 1) = rule.integrate(integrand);
    }

  // Row normalizations and partition constants.
  double log_det_scale = 0.0;
  switch (conditioning) {
    case MomentConditioning::none:
      for (int j = 1; j <= k; ++j) log_det_scale -= std::lgamma(static_cast<double>(j));
      log_det_scale += 0.5 * n * (n - 1.0) * std::log(static_cast<double>(n));
      break;
    case MomentConditioning::origin:
      for (int j = 1; j <= k; ++j) log_det_scale -= std::lgamma(j + 1.0);
      // Z_N^{(0)} = N^{-N(N-1)/2} e^{(N-1)}(0) = N^{-N(N-1)/2}
      log_det_scale += 0.5 * n * (n - 1.0) * std::log(static_cast<double>(n));
      break;
    case MomentConditioning::origin_and_z: {
      for (int i = 1; i <= k; ++i) log_det_scale -= std::lgamma(i + 2.0);
      const double x = n * std::norm(z);
      // Z_N^{(0,z)} = N^{-(N-2)(N+1)/2} e_1^{(N-1)}(x) / x
      log_det_scale += 0.5 * (n - 2.0) * (n + 1.0) * std::log(static_cast<double>(n));
      log_det_scale += std::log(x) - std::log(exp_partial_sum(1, n - 1, x));
      break;
    }
  }
  const Complex det = f.determinant();
  return det.real() * std::exp(log_det_scale);
}

SecondMoments small_n_second_moment_oracle(int n, Complex z) {
  if (n < 3 || n > 4) throw ConfigInvalid("small-n oracle supports n = 3 or 4");
  if (z == Complex(0.0)) throw DeltaDegenerate("oracle needs z != 0");
  const PairGeometry geom = PairGeometry::from_pair(n, 0.0, z);
  const double nn = static_cast<double>(n);

  const auto weight = [&](double x) {
    return [x, nn, z](Complex l) -> double {
      const double g1 = 1.0 / (nn * std::norm(l));
      const double g2 = 1.0 / (nn * std::norm(z - l));
      return (1.0 + g1) * (1.0 + g2) - x * g1 * g2;
    };
  };
  const double d_plus =
      andreief_product_expectation(weight(geom.a), n, MomentConditioning::origin_and_z, z);
  const double d_minus =
      andreief_product_expectation(weight(geom.b), n, MomentConditioning::origin_and_z, z);
  return combine_second_moments(geom, d_plus, d_minus);
}

}  // namespace gin
