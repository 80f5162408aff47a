#include "gin/verify.hpp"

#include <cmath>
#include <functional>

#include "gin/formulas.hpp"
#include "gin/oracle.hpp"
#include "gin/rng.hpp"
#include "gin/schur_chain.hpp"

namespace gin {
namespace {

constexpr double kPi = 3.14159265358979323846264338328;

OracleCheck make_check(std::string name, double value, double reference, double tol) {
  OracleCheck c;
  c.name = std::move(name);
  c.value = value;
  c.reference = reference;
  const double scale = std::abs(reference);
  c.error = scale > 1e-12 ? std::abs(value - reference) / scale : std::abs(value - reference);
  c.tol = tol;
  c.pass = c.error < tol;
  return c;
}

// Worst relative error of a closed-form family over k <= k_max at fixed x.
OracleCheck ak_family_check(AkFamily family, const char* name, int k_max, double x) {
  double worst = 0.0;
  for (int k = 1; k <= k_max; ++k)
    worst = std::max(worst, verify_ak_closed_form(family, k, x).rel_error);
  OracleCheck c;
  c.name = std::string(name) + "_x" + std::to_string(x).substr(0, 4);
  c.value = worst;
  c.reference = 0.0;
  c.error = worst;
  c.tol = 1e-10;
  c.pass = worst < c.tol;
  return c;
}

OracleCheck u_recurrence_check() {
  RngStream rng(20240801, 0);
  double worst = 0.0;
  for (int rep = 0; rep < 32; ++rep) {
    const double a = 1.0 + 49.0 * rng.uniform();
    for (int k = 1; k <= 100; ++k) {
      const double lhs = u_coeff(k, a);
      const double rhs =
          recurrence_m1(k, a) * u_coeff(k - 1, a) - recurrence_m2(k, a) * u_coeff(k - 2, a);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
    }
  }
  OracleCheck c;
  c.name = "u_k_three_term_recurrence";
  c.value = worst;
  c.error = worst;
  c.tol = 1e-10;
  c.pass = worst < c.tol;
  return c;
}

OracleCheck gk_closed_form_check() {
  double worst = 0.0;
  for (double a : {1.2, 1.7, 2.0, 3.5, 8.0}) {
    const double delta = a - 1.0 / a;
    double g_prev = 1.0;                                      // g_0
    double g_cur = 1.0 + delta / 4.0 + (1.0 - 1.0 / a) / 4.0;  // g_1
    for (int k = 2; k <= 60; ++k) {
      const double g_next = recurrence_m1(k, a) * g_cur - recurrence_m2(k, a) * g_prev;
      g_prev = g_cur;
      g_cur = g_next;
      const double closed = gk_closed_form(k, a);
      worst = std::max(worst, std::abs(g_cur - closed) / std::abs(closed));
    }
  }
  OracleCheck c;
  c.name = "g_k_recurrence_vs_closed_form";
  c.value = worst;
  c.error = worst;
  c.tol = 1e-8;
  c.pass = worst < c.tol;
  return c;
}

// (1/pi) int_D 1/((l1 - z) conj(l2 - z)) dm(z) = log((1 - l1 conj(l2))/|l1-l2|^2);
// the exclusion disks contribute exactly zero to the pole parts.
OracleCheck integral2_check() {
  const Complex l1(0.3, 0.0);
  const Complex l2(0.0, 0.5);
  const auto f = [&](Complex z) { return 1.0 / ((l1 - z) * std::conj(l2 - z)); };
  const std::vector<ExclusionDisk> holes = {{l1, 0.04}, {l2, 0.04}};
  const Complex value = disk_integral(f, {0.0, 1.0}, holes, 1e-8) / kPi;
  const Complex ref = std::log((1.0 - l1 * std::conj(l2)) / std::norm(l1 - l2));
  OracleCheck c;
  c.name = "disk_integral_pair_log";
  c.value = std::abs(value);
  c.reference = std::abs(ref);
  c.error = std::abs(value - ref) / std::abs(ref);
  c.tol = 1e-6;
  c.pass = c.error < c.tol;
  return c;
}

// Difference form of the excluded-disk log integral:
// (1/pi) [ int_{D - D(z,eps)} |z-l|^{-2} - int_{D - D(0,eps)} |l|^{-2} ] = log(1-|z|^2).
OracleCheck integral1_difference_check() {
  const Complex z(0.5, 0.0);
  const double eps = 0.05;
  const auto f_z = [&](Complex l) { return Complex(1.0 / std::norm(z - l)); };
  const auto f_0 = [&](Complex l) { return Complex(1.0 / std::norm(l)); };
  const double at_z =
      disk_integral(f_z, {0.0, 1.0}, {{z, eps}}, 1e-8).real() / kPi;
  const double at_0 =
      disk_integral(f_0, {eps, 1.0}, {}, 1e-8).real() / kPi;  // radial hole at 0
  return make_check("disk_integral_log_difference", at_z - at_0, std::log(0.75), 1e-6);
}

OracleCheck kernel_trace_check() {
  const int n = 5;
  std::vector<double> t, w;
  // int K_n(z, z) dm(z) = sum_m w_m e^{t_m} (pi/n) K_n(r_m, r_m), t = n r^2.
  gauss_laguerre(48, t, w);
  double acc = 0.0;
  for (std::size_t m = 0; m < t.size(); ++m) {
    const double r = std::sqrt(t[m] / n);
    acc += w[m] * std::exp(t[m]) * (kPi / n) * ginibre_kernel(n, r, r).real();
  }
  return make_check("kernel_trace", acc, static_cast<double>(n), 1e-6);
}

OracleCheck kernel_bulk_check() {
  const int n = 200;
  const Complex z(0.3, 0.0);
  const double value = ginibre_kernel(n, z, z).real();
  return make_check("kernel_bulk_limit", value, n / kPi, 1e-6);
}

// Radial test function: the moment determinant must match the product of
// independent Gamma moments. g(l) = 1 + 2|l|^2 + |l|^4 / 2 keeps everything
// polynomial, so both sides are exact.
OracleCheck kostlan_product_check() {
  const int n = 4;
  const auto g = [](Complex l) {
    const double r2 = std::norm(l);
    return 1.0 + 2.0 * r2 + 0.5 * r2 * r2;
  };
  const double det_route = andreief_product_expectation(g, n, MomentConditioning::none);
  double product = 1.0;
  for (int i = 1; i <= n; ++i) {
    const double m1 = static_cast<double>(i) / n;                    // E gamma_i / n
    const double m2 = static_cast<double>(i) * (i + 1) / (static_cast<double>(n) * n);
    product *= 1.0 + 2.0 * m1 + 0.5 * m2;
  }
  return make_check("kostlan_moment_product", det_route, product, 1e-6);
}

OracleCheck normalization_check(MomentConditioning cond, const char* name) {
  const double v = andreief_product_expectation([](Complex) { return 1.0; }, 4, cond,
                                                Complex(0.4, 0.2));
  return make_check(name, v, 1.0, 1e-8);
}

OracleCheck tridiag_vs_dense_check() {
  RngStream rng(7, 1);
  double worst = 0.0;
  for (int k = 2; k <= 12; ++k) {
    TridiagonalSpec spec;
    spec.diag.resize(static_cast<std::size_t>(k));
    spec.sub.resize(static_cast<std::size_t>(k - 1));
    spec.super.resize(static_cast<std::size_t>(k - 1));
    ComplexMatrix m = ComplexMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      spec.diag[static_cast<std::size_t>(i)] = rng.complex_normal() + 2.0;
      m(i, i) = spec.diag[static_cast<std::size_t>(i)];
      if (i + 1 < k) {
        spec.sub[static_cast<std::size_t>(i)] = rng.complex_normal();
        spec.super[static_cast<std::size_t>(i)] = rng.complex_normal();
        m(i + 1, i) = spec.sub[static_cast<std::size_t>(i)];
        m(i, i + 1) = spec.super[static_cast<std::size_t>(i)];
      }
    }
    const Complex a = tridiag_det(spec);
    const Complex b = dense_det(m);
    worst = std::max(worst, std::abs(a - b) / std::abs(b));
  }
  OracleCheck c;
  c.name = "tridiag_vs_dense_determinant";
  c.value = worst;
  c.error = worst;
  c.tol = 1e-12;
  c.pass = worst < c.tol;
  return c;
}

OracleCheck small_n_oracle_check(double delta, double tol, const char* name) {
  const int n = 3;
  const double z = std::sqrt(delta / n);
  const SecondMoments closed = second_moment_exact_origin(n, z);
  const SecondMoments quad = small_n_second_moment_oracle(n, z);
  const double e1 = std::abs(closed.abs_o12_sq - quad.abs_o12_sq) / std::abs(quad.abs_o12_sq);
  const double e2 = std::abs(closed.o11_o22 - quad.o11_o22) / std::abs(quad.o11_o22);
  OracleCheck c;
  c.name = name;
  c.value = closed.abs_o12_sq;
  c.reference = quad.abs_o12_sq;
  c.error = std::max(e1, e2);
  c.tol = tol;
  c.pass = c.error < tol;
  return c;
}

double density_mass(const std::function<double(double)>& density) {
  // Map (0, inf) to (0, 1) by v = 1/(1+t); regular at both ends for all three
  // overlap-related densities (tails fall like t^{-2} or faster).
  return integrate_1d(
      [&](double v) {
        const double t = (1.0 - v) / v;
        return density(t) / (v * v);
      },
      0.0, 1.0, 1e-9);
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite() {
  std::vector<OracleCheck> checks;
  for (double x : {0.1, 1.0, 5.0, 20.0}) {
    checks.push_back(ak_family_check(AkFamily::plain, "ak_plain", 50, x));
    checks.push_back(ak_family_check(AkFamily::diag_mean, "ak_diag_mean", 50, x));
    checks.push_back(ak_family_check(AkFamily::offdiag_mean, "ak_offdiag_mean", 50, x));
  }
  checks.push_back(tridiag_vs_dense_check());
  checks.push_back(u_recurrence_check());
  checks.push_back(gk_closed_form_check());
  checks.push_back(integral2_check());
  checks.push_back(integral1_difference_check());
  checks.push_back(kernel_trace_check());
  checks.push_back(kernel_bulk_check());
  checks.push_back(kostlan_product_check());
  checks.push_back(normalization_check(MomentConditioning::none, "andreief_norm_plain"));
  checks.push_back(normalization_check(MomentConditioning::origin, "andreief_norm_origin"));
  checks.push_back(
      normalization_check(MomentConditioning::origin_and_z, "andreief_norm_pair"));
  checks.push_back(small_n_oracle_check(1.0, 1e-6, "second_moment_oracle_delta1"));
  checks.push_back(small_n_oracle_check(4.0, 1e-6, "second_moment_oracle_delta4"));
  checks.push_back(small_n_oracle_check(1e-3, 1e-4, "second_moment_oracle_small_delta"));
  checks.push_back(make_check("inv_gamma2_density_mass",
                              density_mass(inv_gamma2_density), 1.0, 1e-8));
  checks.push_back(make_check(
      "beta_inv_density_mass",
      density_mass([](double t) { return beta_inv_finite_n_density(10, t); }), 1.0, 1e-8));
  checks.push_back(make_check("angle_limit_density_mass",
                              density_mass(angle_limit_density), 1.0, 1e-8));
  return checks;
}

}  // namespace gin
