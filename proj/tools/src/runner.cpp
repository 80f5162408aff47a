#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <mutex>
#include <thread>

#include "gin/angles.hpp"
#include "gin/dynamics.hpp"
#include "gin/ensembles.hpp"
#include "gin/errors.hpp"
#include "gin/estimators.hpp"
#include "gin/formulas.hpp"
#include "gin/oracle.hpp"
#include "gin/schur_chain.hpp"
#include "gin/spectral.hpp"
#include "gin/verify.hpp"
#include "io.hpp"

namespace gin::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunStats {
  long rejected = 0;  // degenerate-spectrum draws
  std::vector<std::pair<long, long>> worker_ranges;
};

// Static contiguous chunks: deterministic, and the ranges go into the manifest.
template <typename F>
void run_chunked(long count, int workers, RunStats& stats, F&& fn) {
  workers = static_cast<int>(std::max<long>(1, std::min<long>(workers, count)));
  stats.worker_ranges.clear();
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    const long lo = count * w / workers;
    const long hi = count * (w + 1) / workers;
    stats.worker_ranges.emplace_back(lo, hi);
    pool.emplace_back([&, lo, hi] {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

json ks_to_json(const KsReport& r) {
  return json{{"test", r.test_name},
              {"n", r.n},
              {"distance", r.distance},
              {"threshold", r.threshold},
              {"pass", r.pass}};
}

void write_ks_csv(const fs::path& dir, const std::vector<KsReport>& reports) {
  CsvWriter csv(dir / "ks_reports.csv", {"test_name", "n", "distance", "threshold", "pass"});
  for (const auto& r : reports)
    csv.row_with_label(r.test_name, {static_cast<double>(r.n), r.distance, r.threshold,
                                     r.pass ? 1.0 : 0.0});
}

// Deterministic non-Gaussian-free spectrum for quenched Monte Carlo stages:
// the distinguished pair at microscopic separation plus a coarse ring.
Spectrum reference_spectrum(int n, double omega) {
  std::vector<Complex> ev;
  ev.reserve(static_cast<std::size_t>(n));
  ev.emplace_back(0.0, 0.0);
  ev.emplace_back(omega / std::sqrt(static_cast<double>(n)), 0.0);
  for (int k = 2; k < n; ++k) {
    const double angle = 2.0 * 3.14159265358979324 * (k - 2 + 0.5) / (n - 2);
    ev.push_back(0.7 * Complex(std::cos(angle), std::sin(angle)));
  }
  return Spectrum::from(std::move(ev));
}

// ---------------------------------------------------------------------------

int run_diag_distribution(const ExperimentConfig& c, const fs::path& dir, RunStats& stats,
                          json& summary) {
  const int n = c.n;
  std::vector<double> samples(static_cast<std::size_t>(c.trials));
  run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const auto radii = sample_conditioned_radii_origin(n, rng);
    std::vector<Complex> others(radii.begin(), radii.end());
    samples[static_cast<std::size_t>(i)] =
        quenched_diag_sample_at(0.0, others, rng) / n;
  });
  std::sort(samples.begin(), samples.end());

  std::vector<KsReport> reports;
  KsReport fin;
  fin.test_name = "diag_origin_finite_n";
  fin.n = c.trials;
  fin.distance = ks_distance(samples, [n](double t) { return beta_inv_finite_n_cdf(n, t); });
  fin.threshold = c.assert_ks.value_or(0.01);
  fin.pass = fin.distance < fin.threshold;
  reports.push_back(fin);

  KsReport lim;
  lim.test_name = "diag_origin_inv_gamma2";
  lim.n = c.trials;
  lim.distance = ks_distance(samples, inv_gamma2_cdf);
  lim.threshold = c.assert_ks.value_or(0.015);
  lim.pass = lim.distance < lim.threshold;
  reports.push_back(lim);
  write_ks_csv(dir, reports);

  const auto hist = histogram_density(samples, 0.0, 5.0, 100);
  std::vector<double> xs, ys, ref;
  for (const auto& [x, y] : hist) {
    xs.push_back(x);
    ys.push_back(y);
    ref.push_back(inv_gamma2_density(x));
  }
  write_plot_data(dir, "diag_hist", {xs, ys, ref}, "O11/N",
                  "density (empirical, inverse-Gamma(2))", "diagonal overlap at the origin");

  summary["ks"] = json::array({ks_to_json(fin), ks_to_json(lim)});
  summary["median"] = samples[samples.size() / 2];
  if (c.assert_ks && !fin.pass) return kExitAssertionFailed;
  return kExitPass;
}

int run_universality(const ExperimentConfig& c, const fs::path& dir, RunStats& stats,
                     json& summary) {
  const int n = c.n;
  const Complex window_center(c.window_center_re, c.window_center_im);
  std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(c.trials));
  std::vector<DiagWindowAccumulator> window_acc(
      static_cast<std::size_t>(c.trials),
      DiagWindowAccumulator(DiskWindow::microscopic(window_center, n, c.window_c), n));
  std::vector<long> rejected(static_cast<std::size_t>(c.trials), 0);
  run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const EnsembleSpec spec{c.ensemble, n, 0.0};
    try {
      const auto [sp, sys] = eigendecompose(sample_matrix(spec, rng));
      const auto diag = diag_overlaps(sys.X, sys.Y);
      auto& out = per_trial[static_cast<std::size_t>(i)];
      for (int k = 0; k < n; ++k) {
        const Complex l = sp.eigenvalues[static_cast<std::size_t>(k)];
        window_acc[static_cast<std::size_t>(i)].add(l, diag[static_cast<std::size_t>(k)]);
        if (std::abs(l) >= c.bulk_radius) continue;
        out.push_back(diag[static_cast<std::size_t>(k)] / (n * (1.0 - std::norm(l))));
      }
    } catch (const DegenerateSpectrum&) {
      rejected[static_cast<std::size_t>(i)] = 1;
    }
  });
  std::vector<double> samples;
  for (const auto& t : per_trial) samples.insert(samples.end(), t.begin(), t.end());
  for (long r : rejected) stats.rejected += r;
  if (samples.empty()) throw EmptyWindow("no bulk eigenvalue collected");
  std::sort(samples.begin(), samples.end());

  // Windowed conditional mean at the configured center.
  DiagWindowAccumulator window(DiskWindow::microscopic(window_center, n, c.window_c), n);
  for (const auto& acc : window_acc) window.merge(acc);
  {
    CsvWriter diag_csv(dir / "diag_stats.csv", {"z_re", "z_im", "n", "mean", "stderr"});
    if (window.count() > 0) {
      const auto est = window.estimate();
      diag_csv.row({window_center.real(), window_center.imag(),
                    static_cast<double>(est.count), est.mean,
                    est.std_error.value_or(std::numeric_limits<double>::quiet_NaN())});
      summary["windowed_mean"] = est.mean;
      summary["windowed_count"] = est.count;
    }
  }

  KsReport ks;
  ks.test_name = "universality_" + to_string(c.ensemble);
  ks.n = static_cast<long>(samples.size());
  ks.distance = ks_distance(samples, inv_gamma2_cdf);
  ks.threshold =
      c.assert_ks.value_or(c.ensemble == EnsembleKind::complex_gaussian ? 0.02 : 0.05);
  ks.pass = ks.distance < ks.threshold;
  write_ks_csv(dir, {ks});

  const auto hist = histogram_density(samples, 0.0, 5.0, 100);
  std::vector<double> xs, ys, ref;
  for (const auto& [x, y] : hist) {
    xs.push_back(x);
    ys.push_back(y);
    ref.push_back(inv_gamma2_density(x));
  }
  write_plot_data(dir, "universality_hist", {xs, ys, ref}, "O_ii / (N(1-|l|^2))",
                  "density (empirical, inverse-Gamma(2))",
                  "bulk overlap histogram, " + to_string(c.ensemble));
  summary["ks"] = ks_to_json(ks);
  summary["bulk_samples"] = samples.size();
  if (c.assert_ks && !ks.pass) return kExitAssertionFailed;
  return kExitPass;
}

int run_offdiag_mean(const ExperimentConfig& c, const fs::path& dir, RunStats& stats,
                     json& summary) {
  const int n = c.n;
  const Spectrum spec = reference_spectrum(n, 0.5 * (c.omega_lo + c.omega_hi));

  // Chain Monte Carlo against the quenched closed forms on a fixed spectrum.
  std::vector<Complex> o12(static_cast<std::size_t>(c.trials));
  std::vector<double> o11(static_cast<std::size_t>(c.trials));
  run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const OverlapTriple t = chain_overlaps(spec, rng);
    o12[static_cast<std::size_t>(i)] = t.o12;
    o11[static_cast<std::size_t>(i)] = t.o11;
  });
  Complex mean12 = 0.0;
  double mean11 = 0.0;
  for (long i = 0; i < c.trials; ++i) {
    mean12 += o12[static_cast<std::size_t>(i)];
    mean11 += o11[static_cast<std::size_t>(i)];
  }
  mean12 /= static_cast<double>(c.trials);
  mean11 /= static_cast<double>(c.trials);
  const Complex expected12 = quenched_offdiag_expectation(spec);
  const double expected11 = quenched_diag_expectation(spec);
  const double rel12 = std::abs(mean12 - expected12) / std::abs(expected12);
  const double rel11 = std::abs(mean11 - expected11) / expected11;

  // Exact-origin formula against the microscopic asymptotic across omega.
  CsvWriter cmp(dir / "offdiag_formulas.csv",
                {"omega", "exact_origin", "asymptotic_re", "rel_diff"});
  double worst_formula = 0.0;
  for (int i = 0; i < c.grid_points; ++i) {
    const double omega = c.omega_lo + (c.omega_hi - c.omega_lo) *
                                          (i + 0.5) / c.grid_points;
    const double z = omega / std::sqrt(static_cast<double>(n));
    const double exact = mean_offdiag_exact_origin(n, z);
    const Complex asym = mean_offdiag_asymptotic(n, 0.0, z);
    const double rel = std::abs(exact - asym.real()) / std::abs(exact);
    worst_formula = std::max(worst_formula, rel);
    cmp.row({omega, exact, asym.real(), rel});
  }

  // Full-matrix pair statistics in sub-bands of the configured window.
  const int pair_n = std::max(n, 64);
  const long pair_trials = std::min<long>(c.trials, 200);
  const Complex center(c.window_center_re, c.window_center_im);
  const int bands = 4;
  std::vector<std::vector<PairWindowAccumulator>> acc(
      static_cast<std::size_t>(pair_trials));
  run_chunked(pair_trials, c.resolved_workers(), stats, [&](long i) {
    auto& row = acc[static_cast<std::size_t>(i)];
    for (int b = 0; b < bands; ++b) {
      const double lo = c.omega_lo + (c.omega_hi - c.omega_lo) * b / bands;
      const double hi = c.omega_lo + (c.omega_hi - c.omega_lo) * (b + 1) / bands;
      row.emplace_back(PairWindow{center, center, 0.3, lo, hi}, pair_n);
    }
    RngStream rng(c.seed ^ 0x9e3779b9, static_cast<std::uint64_t>(i));
    try {
      const auto [sp, sys] = eigendecompose(
          sample_matrix({EnsembleKind::complex_gaussian, pair_n, 0.0}, rng));
      const OverlapMatrix o = overlaps(sys.X, sys.Y);
      for (auto& a : row) a.add_matrix(sp.eigenvalues, o.O);
    } catch (const DegenerateSpectrum&) {
    }
  });
  CsvWriter pair_csv(dir / "pair_stats.csv",
                     {"omega_lo", "omega_hi", "n", "reO12", "imO12", "absO12sq", "O11O22"});
  bool sign_ok = true;
  for (int b = 0; b < bands; ++b) {
    PairWindowAccumulator merged(
        PairWindow{center, center, 0.3,
                   c.omega_lo + (c.omega_hi - c.omega_lo) * b / bands,
                   c.omega_lo + (c.omega_hi - c.omega_lo) * (b + 1) / bands},
        pair_n);
    for (const auto& row : acc)
      if (!row.empty()) merged.merge(row[static_cast<std::size_t>(b)]);
    if (merged.count() == 0) continue;
    const auto m12 = merged.mean_o12();
    pair_csv.row({c.omega_lo + (c.omega_hi - c.omega_lo) * b / bands,
                  c.omega_lo + (c.omega_hi - c.omega_lo) * (b + 1) / bands,
                  static_cast<double>(merged.count()), m12.mean.real(), m12.mean.imag(),
                  merged.mean_abs_o12_sq().mean, merged.mean_o11_o22().mean});
    sign_ok = sign_ok && m12.mean.real() < 0.0;  // microscopic bands repel
  }
  summary["pair_mean_sign_negative"] = sign_ok;

  summary["chain_mean_o12"] = {mean12.real(), mean12.imag()};
  summary["quenched_o12"] = {expected12.real(), expected12.imag()};
  summary["rel_err_o12"] = rel12;
  summary["rel_err_o11"] = rel11;
  summary["max_formula_rel_diff"] = worst_formula;
  if (c.assert_rel_err && (rel12 > *c.assert_rel_err || rel11 > *c.assert_rel_err))
    return kExitAssertionFailed;
  return kExitPass;
}

int run_second_moments(const ExperimentConfig& c, const fs::path& dir, RunStats& stats,
                       json& summary) {
  // Closed form against the quadrature oracle at small dimension.
  CsvWriter oracle_csv(dir / "second_moments_oracle.csv",
                       {"n", "delta", "closed_o12sq", "closed_o11o22", "oracle_o12sq",
                        "oracle_o11o22", "rel_err"});
  double worst_oracle = 0.0;
  for (int nn : {3, 4})
    for (double delta : {0.5, 1.0, 2.0, 4.0}) {
      const double z = std::sqrt(delta / nn);
      const SecondMoments closed = second_moment_exact_origin(nn, z);
      const SecondMoments quad = small_n_second_moment_oracle(nn, z);
      const double rel =
          std::max(std::abs(closed.abs_o12_sq - quad.abs_o12_sq) / quad.abs_o12_sq,
                   std::abs(closed.o11_o22 - quad.o11_o22) / quad.o11_o22);
      worst_oracle = std::max(worst_oracle, rel);
      oracle_csv.row({static_cast<double>(nn), delta, closed.abs_o12_sq, closed.o11_o22,
                      quad.abs_o12_sq, quad.o11_o22, rel});
    }

  // Chain Monte Carlo second moments on a fixed spectrum.
  const int n_chain = std::min(c.n, 12);
  const Spectrum spec = reference_spectrum(n_chain, 0.5 * (c.omega_lo + c.omega_hi));
  std::vector<double> abs12(static_cast<std::size_t>(c.trials));
  std::vector<double> prod(static_cast<std::size_t>(c.trials));
  run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const OverlapTriple t = chain_overlaps(spec, rng);
    abs12[static_cast<std::size_t>(i)] = std::norm(t.o12);
    prod[static_cast<std::size_t>(i)] = t.o11 * t.o22;
  });
  double mean_abs12 = 0.0;
  double mean_prod = 0.0;
  for (long i = 0; i < c.trials; ++i) {
    mean_abs12 += abs12[static_cast<std::size_t>(i)];
    mean_prod += prod[static_cast<std::size_t>(i)];
  }
  mean_abs12 /= static_cast<double>(c.trials);
  mean_prod /= static_cast<double>(c.trials);
  const SecondMoments quenched = quenched_second_moments(spec);
  const double rel_mc = std::max(std::abs(mean_abs12 - quenched.abs_o12_sq) / quenched.abs_o12_sq,
                                 std::abs(mean_prod - quenched.o11_o22) / quenched.o11_o22);

  // Exact-origin closed form against the large-N asymptotic factors.
  CsvWriter asym_csv(dir / "second_moments_asymptotic.csv",
                     {"omega", "exact_o12sq", "asym_o12sq", "exact_o11o22", "asym_o11o22"});
  for (int i = 0; i < c.grid_points; ++i) {
    const double omega =
        c.omega_lo + (c.omega_hi - c.omega_lo) * (i + 0.5) / c.grid_points;
    const double z = omega / std::sqrt(static_cast<double>(c.n));
    const SecondMoments exact = second_moment_exact_origin(c.n, z);
    const SecondMoments asym = second_moment_asymptotic(c.n, 0.0, z);
    asym_csv.row({omega, exact.abs_o12_sq, asym.abs_o12_sq, exact.o11_o22, asym.o11_o22});
  }

  summary["worst_oracle_rel_err"] = worst_oracle;
  summary["chain_mc_rel_err"] = rel_mc;
  if (c.assert_rel_err && worst_oracle > *c.assert_rel_err) return kExitAssertionFailed;
  return kExitPass;
}

int run_pseudospectrum(const ExperimentConfig& c, const fs::path& dir, RunStats& stats,
                       json& summary) {
  const int n = c.n;
  const DiskWindow ball{Complex(c.window_center_re, c.window_center_im), c.ball_radius};
  std::vector<double> empirical(static_cast<std::size_t>(c.trials), 0.0);
  std::vector<long> in_ball(static_cast<std::size_t>(c.trials), 0);
  std::vector<long> rejected(static_cast<std::size_t>(c.trials), 0);
  double predicted = 0.0;
  run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const EnsembleSpec spec{c.ensemble, n, 0.0};
    try {
      const auto [sp, sys] = eigendecompose(sample_matrix(spec, rng));
      const auto diag = diag_overlaps(sys.X, sys.Y);
      const auto v = pseudospectrum_volume(sp.eigenvalues, diag, ball, c.epsilon, n);
      empirical[static_cast<std::size_t>(i)] = v.empirical;
      in_ball[static_cast<std::size_t>(i)] = v.eigenvalues_in_ball;
    } catch (const DegenerateSpectrum&) {
      rejected[static_cast<std::size_t>(i)] = 1;
    }
  });
  predicted = c.epsilon * c.epsilon * static_cast<double>(n) * static_cast<double>(n) *
              disk_one_minus_sq_integral(ball.center, ball.radius);

  CsvWriter csv(dir / "pseudospectrum.csv", {"trial", "empirical", "predicted", "in_ball"});
  double mean_emp = 0.0;
  long used = 0;
  for (long i = 0; i < c.trials; ++i) {
    if (rejected[static_cast<std::size_t>(i)]) {
      ++stats.rejected;
      continue;
    }
    csv.row({static_cast<double>(i), empirical[static_cast<std::size_t>(i)], predicted,
             static_cast<double>(in_ball[static_cast<std::size_t>(i)])});
    mean_emp += empirical[static_cast<std::size_t>(i)];
    ++used;
  }
  mean_emp /= std::max<long>(1, used);
  const double ratio = mean_emp / predicted;
  summary["ratio"] = ratio;
  summary["trials_used"] = used;
  if ((c.assert_ratio_lo && ratio < *c.assert_ratio_lo) ||
      (c.assert_ratio_hi && ratio > *c.assert_ratio_hi))
    return kExitAssertionFailed;
  return kExitPass;
}

int run_dynamics(const ExperimentConfig& c, const fs::path& dir, RunStats& stats,
                 json& summary) {
  const int n = c.n;

  // Real ensemble: the drift-checked real flow, with collision times surfaced.
  if (c.ensemble == EnsembleKind::real_gaussian) {
    std::vector<RealDriftReport> reports(static_cast<std::size_t>(c.trials));
    run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
      RngStream rng(c.seed, static_cast<std::uint64_t>(i));
      const ComplexMatrix g0 =
          sample_matrix({EnsembleKind::real_gaussian, n, 0.0}, rng);
      FlowConfig cfg{n, c.dt, c.steps, FlowKind::real_ou, StepScheme::exact, 0};
      reports[static_cast<std::size_t>(i)] = real_flow_drift_check(g0, cfg, rng);
    });
    json collisions = json::array();
    double cov = 0.0;
    long steps = 0;
    for (const auto& r : reports) {
      for (double t : r.collision_times) collisions.push_back(t);
      cov += r.residual_cov_ratio * r.steps;
      steps += r.steps;
    }
    summary["collision_times"] = collisions;
    summary["steps"] = steps;
    summary["residual_cov_ratio"] = steps > 0 ? cov / steps : 0.0;
    const double ratio = steps > 0 ? cov / steps : 0.0;
    if (c.assert_ratio_lo && ratio < *c.assert_ratio_lo) return kExitAssertionFailed;
    if (c.assert_ratio_hi && ratio > *c.assert_ratio_hi) return kExitAssertionFailed;
    return kExitPass;
  }
  double realized_diag = 0.0;
  double predicted_diag = 0.0;
  double nc_abs = 0.0;  // per-path mean |sum dl_i dl_j|, accumulated
  long truncated = 0;
  std::vector<json> per_path(static_cast<std::size_t>(c.trials));

  std::mutex dump_mutex;
  bool dumped = false;
  run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const EnsembleSpec espec{EnsembleKind::complex_gaussian, n, 0.0};
    const ComplexMatrix g0 = sample_matrix(espec, rng);
    FlowConfig cfg{n, c.dt, c.steps, FlowKind::complex_ou, StepScheme::exact, 0};
    const auto seq = evolve_ou(g0, cfg, rng);
    const TrackedFlow flow = track_flow(seq, c.dt, true);
    json rec;
    rec["rejected_steps"] = flow.path.rejected_steps;
    rec["valid_steps"] = flow.path.valid_steps();
    try {
      const BracketReport r = empirical_brackets(flow, c.dt, std::min(100, c.steps / 2));
      double rd = 0.0;
      double pd = 0.0;
      double nc = 0.0;
      for (int k = 0; k < n; ++k) {
        rd += r.realized(k, k).real();
        pd += r.predicted(k, k).real();
        for (int j = 0; j < n; ++j) nc += std::abs(r.non_conjugated(k, j));
      }
      std::lock_guard<std::mutex> lock(dump_mutex);
      realized_diag += rd;
      predicted_diag += pd;
      nc_abs += nc / (static_cast<double>(n) * n);
      if (!dumped) {
        dumped = true;
        CsvWriter path_csv(dir / "path_dump.csv", {"t", "k", "re", "im", "O_kk"});
        for (std::size_t s = 0; s < flow.path.positions.size(); ++s)
          for (int k = 0; k < n; ++k)
            path_csv.row({flow.path.times[s], static_cast<double>(k),
                          flow.path.positions[s][static_cast<std::size_t>(k)].real(),
                          flow.path.positions[s][static_cast<std::size_t>(k)].imag(),
                          flow.path.diag_overlap[s][static_cast<std::size_t>(k)]});
      }
    } catch (const InsufficientSteps&) {
      std::lock_guard<std::mutex> lock(dump_mutex);
      ++truncated;
    }
    per_path[static_cast<std::size_t>(i)] = std::move(rec);
  });

  const double diag_ratio = predicted_diag > 0.0 ? realized_diag / predicted_diag : 0.0;
  // mean |non-conjugated entry| relative to the mean predicted diagonal entry
  const double nc_ratio = predicted_diag > 0.0
                              ? (nc_abs / c.trials) / (predicted_diag / (static_cast<double>(n) * c.trials))
                              : 0.0;
  summary["diag_bracket_ratio"] = diag_ratio;
  summary["non_conjugated_ratio"] = nc_ratio;
  summary["truncated_paths"] = truncated;
  summary["per_path"] = per_path;

  if (c.msd_time > 0.0) {
    const MsdResult msd = diffusive_msd(n, c.msd_time, c.msd_substeps,
                                        static_cast<int>(c.trials), 0.0, 1.0, c.seed + 1,
                                        c.resolved_workers());
    summary["msd_empirical"] = msd.empirical;
    summary["msd_predicted"] = msd.predicted;
    summary["msd_paths_used"] = msd.paths_used;
  }
  if (c.assert_ratio_lo && diag_ratio < *c.assert_ratio_lo) return kExitAssertionFailed;
  if (c.assert_ratio_hi && diag_ratio > *c.assert_ratio_hi) return kExitAssertionFailed;
  return kExitPass;
}

int run_angles(const ExperimentConfig& c, const fs::path& dir, RunStats& stats,
               json& summary) {
  const int n = c.n;
  std::vector<std::vector<AngleSample>> per_trial(static_cast<std::size_t>(c.trials));
  run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const EnsembleSpec spec{c.ensemble, n, 0.0};
    try {
      const auto [sp, sys] = eigendecompose(sample_matrix(spec, rng));
      const double sqn = std::sqrt(static_cast<double>(n));
      auto& out = per_trial[static_cast<std::size_t>(i)];
      for (int a = 0; a < n; ++a) {
        if (std::abs(sp.eigenvalues[static_cast<std::size_t>(a)]) >= c.bulk_radius) continue;
        for (int b = a + 1; b < n; ++b) {
          if (std::abs(sp.eigenvalues[static_cast<std::size_t>(b)]) >= c.bulk_radius)
            continue;
          const double omega = sqn * std::abs(sp.eigenvalues[static_cast<std::size_t>(a)] -
                                              sp.eigenvalues[static_cast<std::size_t>(b)]);
          if (omega < c.omega_lo || omega >= c.omega_hi) continue;
          out.push_back({a, b, eigenvector_angle(sys.X, a, b), omega});
        }
      }
    } catch (const DegenerateSpectrum&) {
    }
  });
  std::vector<AngleSample> samples;
  for (auto& t : per_trial) samples.insert(samples.end(), t.begin(), t.end());

  const KsReport micro =
      angle_distribution_test(samples, c.assert_ks.value_or(0.05), 100);

  // At-origin law by direct simulation of N beta_{1,U}; these draws are
  // cheap, so the sample count gets its own floor.
  const long origin_trials = std::max<long>(c.trials, 10'000);
  std::vector<double> origin(static_cast<std::size_t>(origin_trials));
  run_chunked(origin_trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed ^ 0x5bd1e995, static_cast<std::uint64_t>(i));
    const int u = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
    const double e1 = rng.exponential();
    const double gk = rng.gamma_int(static_cast<std::uint64_t>(u));
    origin[static_cast<std::size_t>(i)] = n * e1 / (e1 + gk);
  });
  const KsReport at_origin = angle_origin_test(origin, n, 0.02, 100);

  CsvWriter csv(dir / "angles.csv", {"omega", "n", "ks", "pass"});
  csv.row({0.5 * (c.omega_lo + c.omega_hi), static_cast<double>(micro.n), micro.distance,
           micro.pass ? 1.0 : 0.0});
  csv.row({0.0, static_cast<double>(at_origin.n), at_origin.distance,
           at_origin.pass ? 1.0 : 0.0});
  summary["microscopic"] = ks_to_json(micro);
  summary["at_origin"] = ks_to_json(at_origin);
  if (c.assert_ks && !(micro.pass && at_origin.pass)) return kExitAssertionFailed;
  return kExitPass;
}

int run_extremes(const ExperimentConfig& c, const fs::path& dir, RunStats& stats,
                 json& summary) {
  const int n = c.n;
  std::vector<ExtremesReport> reports(static_cast<std::size_t>(c.trials));
  std::vector<long> rejected(static_cast<std::size_t>(c.trials), 0);
  run_chunked(c.trials, c.resolved_workers(), stats, [&](long i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const EnsembleSpec spec{c.ensemble, n, 0.0};
    try {
      const auto [sp, sys] = eigendecompose(sample_matrix(spec, rng));
      const auto diag = diag_overlaps(sys.X, sys.Y);
      reports[static_cast<std::size_t>(i)] = extremes_scan(
          sp.eigenvalues, diag, {{0.0, c.bulk_radius}}, n, c.eps_lower, c.eps_upper);
    } catch (const DegenerateSpectrum&) {
      rejected[static_cast<std::size_t>(i)] = 1;
    }
  });

  CsvWriter csv(dir / "extremes.csv",
                {"trial", "count", "min_diag", "max_diag", "lower_violated",
                 "upper_violated"});
  long lower_violations = 0;
  long upper_violations = 0;
  long used = 0;
  std::vector<double> maxima;
  for (long i = 0; i < c.trials; ++i) {
    if (rejected[static_cast<std::size_t>(i)]) {
      ++stats.rejected;
      continue;
    }
    const auto& r = reports[static_cast<std::size_t>(i)];
    csv.row({static_cast<double>(i), static_cast<double>(r.count), r.min_diag, r.max_diag,
             r.lower_violated ? 1.0 : 0.0, r.upper_violated ? 1.0 : 0.0});
    lower_violations += r.lower_violated ? 1 : 0;
    upper_violations += r.upper_violated ? 1 : 0;
    maxima.push_back(r.max_diag / std::pow(static_cast<double>(n), 1.5));
    ++used;
  }

  // Exploratory maximum-law plot data: empirical CDF of max O_ii / N^{3/2}
  // against the heuristic Frechet curve. No pass/fail.
  std::sort(maxima.begin(), maxima.end());
  std::vector<double> xs, emp, ref;
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    xs.push_back(maxima[i]);
    emp.push_back((i + 1.0) / maxima.size());
    ref.push_back(frechet_cdf(maxima[i]));
  }
  write_plot_data(dir, "frechet_max", {xs, emp, ref}, "max O_ii / N^{3/2}",
                  "CDF (empirical, heuristic)", "extreme overlap law");

  summary["trials_used"] = used;
  summary["lower_violation_rate"] = used ? static_cast<double>(lower_violations) / used : 0.0;
  summary["upper_violation_rate"] = used ? static_cast<double>(upper_violations) / used : 0.0;
  summary["lower_bound"] = std::pow(static_cast<double>(n), 1.0 - c.eps_lower);
  summary["upper_bound"] = std::pow(static_cast<double>(n), 1.5 + c.eps_upper);
  return kExitPass;
}

int run_formulas(const ExperimentConfig& c, const fs::path& dir, RunStats&,
                 json& summary) {
  const int n = c.n;
  std::function<double(double)> fn;
  if (c.function == "mean_diag_exact")
    fn = [n](double r) { return mean_diag_exact(n, r); };
  else if (c.function == "mean_diag_asymptotic")
    fn = [n](double r) { return mean_diag_asymptotic(n, r); };
  else if (c.function == "mean_offdiag_exact_origin")
    fn = [n](double r) { return mean_offdiag_exact_origin(n, r); };
  else if (c.function == "inv_gamma2_density")
    fn = inv_gamma2_density;
  else if (c.function == "inv_gamma2_cdf")
    fn = inv_gamma2_cdf;
  else if (c.function == "beta_inv_density")
    fn = [n](double t) { return beta_inv_finite_n_density(n, t); };
  else if (c.function == "angle_limit_density")
    fn = angle_limit_density;
  else if (c.function == "angle_limit_cdf")
    fn = angle_limit_cdf;
  else if (c.function == "frechet_cdf")
    fn = frechet_cdf;
  else if (c.function == "ginibre_kernel_diag")
    fn = [n](double r) { return ginibre_kernel(n, r, r).real(); };
  else
    throw ConfigInvalid("unknown function '" + c.function + "'");

  CsvWriter csv(dir / "formulas.csv", {"x", "value"});
  for (int i = 0; i < c.grid_points; ++i) {
    const double x = c.grid_lo + (c.grid_hi - c.grid_lo) *
                                     (c.grid_points == 1 ? 0.0
                                                         : static_cast<double>(i) /
                                                               (c.grid_points - 1));
    csv.row({x, fn(x)});
  }
  summary["function"] = c.function;
  summary["points"] = c.grid_points;
  return kExitPass;
}

int run_verify(const ExperimentConfig&, const fs::path& dir, RunStats&, json& summary) {
  const auto checks = run_oracle_suite();
  json arr = json::array();
  bool all = true;
  for (const auto& ch : checks) {
    arr.push_back(json{{"name", ch.name},
                       {"value", ch.value},
                       {"reference", ch.reference},
                       {"error", ch.error},
                       {"tol", ch.tol},
                       {"pass", ch.pass}});
    all = all && ch.pass;
  }
  summary["checks"] = arr;
  summary["all_pass"] = all;
  write_json(dir / "verify_report.json", summary);
  return all ? kExitPass : kExitAssertionFailed;
}

}  // namespace

int run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigInvalid("cannot create output directory '" + dir.string() + "'");

  RunStats stats;
  json summary;
  summary["experiment"] = to_string(config.experiment);
  int code = kExitPass;
  bool backend_failure = false;
  try {
    switch (config.experiment) {
      case Experiment::diag_distribution:
        code = run_diag_distribution(config, dir, stats, summary);
        break;
      case Experiment::universality:
        code = run_universality(config, dir, stats, summary);
        break;
      case Experiment::offdiag_mean:
        code = run_offdiag_mean(config, dir, stats, summary);
        break;
      case Experiment::second_moments:
        code = run_second_moments(config, dir, stats, summary);
        break;
      case Experiment::pseudospectrum:
        code = run_pseudospectrum(config, dir, stats, summary);
        break;
      case Experiment::dynamics:
        code = run_dynamics(config, dir, stats, summary);
        break;
      case Experiment::angles:
        code = run_angles(config, dir, stats, summary);
        break;
      case Experiment::extremes:
        code = run_extremes(config, dir, stats, summary);
        break;
      case Experiment::formulas:
        code = run_formulas(config, dir, stats, summary);
        break;
      case Experiment::verify:
        code = run_verify(config, dir, stats, summary);
        break;
    }
  } catch (const ConfigInvalid&) {
    throw;  // the caller maps this to the config-error exit code
  } catch (const Error& e) {
    // Partial results stay on disk; the manifest carries the failure marker.
    summary["backend_error"] = e.what();
    backend_failure = true;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest;
  manifest["version"] = "ginover-" GINOVER_TOOL_VERSION;
  manifest["config"] = config_to_text(config);
  manifest["seed"] = config.seed;
  manifest["seed_from_entropy"] = config.seed_from_entropy;
  manifest["wall_time_s"] = wall;
  manifest["workers"] = config.resolved_workers();
  json ranges = json::array();
  for (const auto& [lo, hi] : stats.worker_ranges) ranges.push_back({lo, hi});
  manifest["worker_trial_ranges"] = ranges;
  manifest["rejected_samples"] = stats.rejected;
  manifest["status"] = backend_failure ? "backend_failure"
                       : code == kExitPass ? "pass"
                                           : "assertion_failure";
  write_json(dir / "manifest.json", manifest);
  summary["rejected_samples"] = stats.rejected;
  write_json(dir / "summary.json", summary);
  return backend_failure ? kExitBackendFailure : code;
}

}  // namespace gin::cli
