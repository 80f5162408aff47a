#include "gin/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gin/ensembles.hpp"
#include "gin/errors.hpp"
#include "gin/estimators.hpp"
#include "gin/parallel.hpp"

namespace gin {
namespace {

constexpr double kPi = 3.14159265358979323846264338328;

struct MatchOutcome {
  std::vector<int> assignment;  // previous index -> current index
  bool ambiguous = false;
};

// Greedy nearest neighbor with a second-nearest ratio test; any ambiguity or
// claim conflict falls back to the optimal assignment.
MatchOutcome match_spectra(const std::vector<Complex>& prev, const std::vector<Complex>& cur,
                           double ambiguity_ratio) {
  const int n = static_cast<int>(prev.size());
  MatchOutcome out;
  out.assignment.assign(static_cast<std::size_t>(n), -1);
  std::vector<bool> claimed(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n && !out.ambiguous; ++i) {
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    int arg = -1;
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(prev[static_cast<std::size_t>(i)] - cur[static_cast<std::size_t>(j)]);
      if (d < best) {
        second = best;
        best = d;
        arg = j;
      } else if (d < second) {
        second = d;
      }
    }
    if (n > 1 && second < ambiguity_ratio * best) out.ambiguous = true;
    if (arg < 0 || claimed[static_cast<std::size_t>(arg)]) out.ambiguous = true;
    if (!out.ambiguous) {
      claimed[static_cast<std::size_t>(arg)] = true;
      out.assignment[static_cast<std::size_t>(i)] = arg;
    }
  }
  if (out.ambiguous) {
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cost(i, j) = std::abs(prev[static_cast<std::size_t>(i)] - cur[static_cast<std::size_t>(j)]);
    out.assignment = min_cost_assignment(cost);
  }
  return out;
}

}  // namespace

void ou_step(ComplexMatrix& g, const FlowConfig& config, RngStream& rng) {
  const int n = config.n;
  const double dt = config.dt;
  double decay = 0.0;
  double noise = 0.0;
  if (config.scheme == StepScheme::euler) {
    decay = 1.0 - 0.5 * dt;
    noise = std::sqrt(dt / n);
  } else {
    decay = std::exp(-0.5 * dt);
    noise = std::sqrt(-std::expm1(-dt) / n);
  }
  noise *= config.noise_scale;
  if (config.kind == FlowKind::complex_ou) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g(i, j) = decay * g(i, j) + noise * rng.complex_normal();
  } else {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        g(i, j) = decay * g(i, j).real() + noise * rng.normal();
  }
}

std::vector<ComplexMatrix> evolve_ou(const ComplexMatrix& g0, const FlowConfig& config,
                                     RngStream& rng) {
  if (config.n != g0.rows() || config.dt <= 0.0 || config.steps < 1)
    throw ConfigInvalid("bad flow config");
  std::vector<ComplexMatrix> seq;
  seq.reserve(static_cast<std::size_t>(config.steps) + 1);
  seq.push_back(g0);
  ComplexMatrix g = g0;
  for (int s = 0; s < config.steps; ++s) {
    ou_step(g, config, rng);
    seq.push_back(g);
  }
  return seq;
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0)
      assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
  return assignment;
}

int EigenPath::valid_steps() const {
  int s = 0;
  while (s < static_cast<int>(matched.size()) && matched[static_cast<std::size_t>(s)]) ++s;
  return s;
}

TrackedFlow track_flow(const std::vector<ComplexMatrix>& sequence, double dt,
                       bool keep_overlaps, double ambiguity_ratio, MatchPolicy policy) {
  if (sequence.empty()) throw ConfigInvalid("empty matrix sequence");
  const int n = static_cast<int>(sequence.front().rows());
  TrackedFlow flow;
  EigenPath& path = flow.path;

  std::vector<Complex> labels;  // eigenvalue of each path at the previous step
  bool truncated = false;
  for (std::size_t s = 0; s < sequence.size(); ++s) {
    if (truncated) break;
    Spectrum spec;
    EigenSystem sys;
    try {
      std::tie(spec, sys) = eigendecompose(sequence[s]);
    } catch (const DegenerateSpectrum&) {
      ++path.rejected_steps;
      if (!path.matched.empty()) path.matched.back() = false;
      break;
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    if (s == 0) {
      for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
      labels = spec.eigenvalues;
    } else {
      const MatchOutcome m = match_spectra(labels, spec.eigenvalues, ambiguity_ratio);
      // order[path] = index into the current spectrum
      order = m.assignment;
      path.matched.push_back(!m.ambiguous);
      if (m.ambiguous && policy == MatchPolicy::truncate) truncated = true;
      for (int k = 0; k < n; ++k)
        labels[static_cast<std::size_t>(k)] =
            spec.eigenvalues[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    }

    path.times.push_back(static_cast<double>(s) * dt);
    std::vector<Complex> pos(static_cast<std::size_t>(n));
    std::vector<double> ov(static_cast<std::size_t>(n));
    const std::vector<double> diag = diag_overlaps(sys.X, sys.Y);
    for (int k = 0; k < n; ++k) {
      const int idx = order[static_cast<std::size_t>(k)];
      pos[static_cast<std::size_t>(k)] = spec.eigenvalues[static_cast<std::size_t>(idx)];
      ov[static_cast<std::size_t>(k)] = diag[static_cast<std::size_t>(idx)];
    }
    path.positions.push_back(std::move(pos));
    path.diag_overlap.push_back(std::move(ov));

    if (keep_overlaps) {
      const OverlapMatrix o = overlaps(sys.X, sys.Y);
      ComplexMatrix perm(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          perm(a, b) = o.O(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
      flow.overlaps.push_back(std::move(perm));
    }
  }
  return flow;
}

EigenPath track_eigenvalue_paths(const std::vector<ComplexMatrix>& sequence, double dt,
                                 double ambiguity_ratio, MatchPolicy policy) {
  return track_flow(sequence, dt, false, ambiguity_ratio, policy).path;
}

BracketReport empirical_brackets(const TrackedFlow& flow, double dt, int min_steps) {
  const EigenPath& path = flow.path;
  if (path.positions.empty()) throw InsufficientSteps("no tracked steps");
  const int n = static_cast<int>(path.positions.front().size());
  const int usable = std::min(path.valid_steps(),
                              static_cast<int>(path.positions.size()) - 1);
  if (usable < min_steps) throw InsufficientSteps("only " + std::to_string(usable) +
                                                  " matched steps");
  BracketReport r;
  r.realized = ComplexMatrix::Zero(n, n);
  r.predicted = ComplexMatrix::Zero(n, n);
  r.non_conjugated = ComplexMatrix::Zero(n, n);
  const bool have_full = static_cast<int>(flow.overlaps.size()) >= usable;
  for (int s = 0; s < usable; ++s) {
    const auto& a = path.positions[static_cast<std::size_t>(s)];
    const auto& b = path.positions[static_cast<std::size_t>(s) + 1];
    for (int i = 0; i < n; ++i) {
      const Complex di = b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        const Complex dj = b[static_cast<std::size_t>(j)] - a[static_cast<std::size_t>(j)];
        r.realized(i, j) += di * std::conj(dj);
        r.non_conjugated(i, j) += di * dj;
      }
      r.predicted(i, i) += path.diag_overlap[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] * dt / n;
    }
    if (have_full) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) r.predicted(i, j) += flow.overlaps[static_cast<std::size_t>(s)](i, j) * dt / static_cast<double>(n);
    }
  }
  double realized_diag = 0.0;
  double predicted_diag = 0.0;
  double nc_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    realized_diag += r.realized(i, i).real();
    predicted_diag += r.predicted(i, i).real();
    for (int j = 0; j < n; ++j) nc_sum += std::abs(r.non_conjugated(i, j));
  }
  r.diag_ratio = realized_diag / predicted_diag;
  r.non_conj_ratio = (nc_sum / (n * n)) / (predicted_diag / n);
  return r;
}

MsdResult diffusive_msd(int n, double t, int substeps, int trials, Complex ball_center,
                        double ball_radius, std::uint64_t seed, int workers) {
  MsdResult out;
  out.predicted = t * disk_one_minus_sq_integral(ball_center, ball_radius) / kPi;

  std::vector<double> trial_sum(static_cast<std::size_t>(trials), 0.0);
  std::vector<long> trial_hits(static_cast<std::size_t>(trials), -1);  // -1 = unusable

  parallel_for(trials, workers, [&](long trial) {
    RngStream rng(seed, static_cast<std::uint64_t>(trial));
    EnsembleSpec spec{EnsembleKind::complex_gaussian, n, 0.0};
    const ComplexMatrix g0 = sample_matrix(spec, rng);
    FlowConfig cfg{n, t / substeps, substeps, FlowKind::complex_ou, StepScheme::exact, 0};
    const auto seq = evolve_ou(g0, cfg, rng);
    // Resolve ambiguous steps by optimal assignment: truncating here would
    // condition the ensemble on low-mobility draws and bias the displacement
    // low, while a resolved close-pair swap costs only O(gap * step).
    const EigenPath path = track_eigenvalue_paths(seq, cfg.dt, 1.5, MatchPolicy::resolve);
    if (static_cast<int>(path.positions.size()) != substeps + 1)
      return;  // a degenerate-spectrum step; dropped, counted by caller
    double acc = 0.0;
    long hits = 0;
    for (int k = 0; k < n; ++k) {
      const Complex start = path.positions.front()[static_cast<std::size_t>(k)];
      if (std::abs(start - ball_center) >= ball_radius) continue;
      const Complex end = path.positions.back()[static_cast<std::size_t>(k)];
      acc += std::norm(end - start);
      ++hits;
    }
    trial_sum[static_cast<std::size_t>(trial)] = acc;
    trial_hits[static_cast<std::size_t>(trial)] = hits;
  });

  double total = 0.0;
  for (int i = 0; i < trials; ++i) {
    if (trial_hits[static_cast<std::size_t>(i)] < 0) continue;
    total += trial_sum[static_cast<std::size_t>(i)];
    out.eigenvalues_in_ball += trial_hits[static_cast<std::size_t>(i)];
    ++out.paths_used;
  }
  if (out.paths_used == 0) throw InsufficientSamples("every trial was truncated");
  out.empirical = total / (static_cast<double>(out.paths_used) * n);
  return out;
}

RealDriftReport real_flow_drift_check(const ComplexMatrix& g0, const FlowConfig& config,
                                      RngStream& rng) {
  const int n = config.n;
  RealDriftReport rep;
  ComplexMatrix g = g0;
  Complex residual_sum = 0.0;
  Complex naive_residual_sum = 0.0;
  double residual_norm_sum = 0.0;
  double residual_sq_sum = 0.0;
  double predicted_var_sum = 0.0;
  long residual_count = 0;
  long prev_real_count = -1;

  const double real_tol = 1e-9;

  for (int s = 0; s < config.steps; ++s) {
    Spectrum spec;
    EigenSystem sys;
    try {
      std::tie(spec, sys) = eigendecompose(g);
    } catch (const DegenerateSpectrum&) {
      break;
    }
    // Pair-conjugate overlap O_{k lbar} = (X^t X)_{lk} (Y Y^t)_{kl}: the
    // non-conjugated Gram matrices of the real flow.
    const ComplexMatrix xtx = sys.X.transpose() * sys.X;
    const ComplexMatrix yyt = sys.Y * sys.Y.transpose();
    const std::vector<double> diag = diag_overlaps(sys.X, sys.Y);

    // Collision flags: a conjugate pair about to merge onto the real axis, or
    // two real eigenvalues about to merge and leave it.
    bool collided = false;
    for (int k = 0; k < n; ++k) {
      const double im = std::abs(spec.eigenvalues[static_cast<std::size_t>(k)].imag());
      const double threshold =
          10.0 * std::sqrt(config.dt * diag[static_cast<std::size_t>(k)] / n);
      if (im > real_tol && im < threshold) collided = true;
      if (im <= real_tol)
        for (int l = 0; l < n; ++l) {
          if (l == k) continue;
          if (std::abs(spec.eigenvalues[static_cast<std::size_t>(l)].imag()) > real_tol)
            continue;
          if (std::abs(spec.eigenvalues[static_cast<std::size_t>(k)] -
                       spec.eigenvalues[static_cast<std::size_t>(l)]) < threshold)
            collided = true;
        }
    }
    long real_count = 0;
    for (int k = 0; k < n; ++k)
      if (std::abs(spec.eigenvalues[static_cast<std::size_t>(k)].imag()) <= real_tol)
        ++real_count;
    if (prev_real_count >= 0 && real_count != prev_real_count) ++rep.real_count_changes;
    prev_real_count = real_count;
    rep.real_eigenvalues = real_count;
    if (collided) {
      rep.collision_times.push_back(s * config.dt);
      break;
    }

    // Predicted drift per eigenvalue. The interaction term is the surviving
    // Ito correction of the real flow and carries the same 1/N normalization
    // as the noise brackets.
    std::vector<Complex> drift(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      Complex acc = -0.5 * spec.eigenvalues[static_cast<std::size_t>(k)];
      for (int l = 0; l < n; ++l) {
        if (l == k) continue;
        const Complex o_kl = xtx(l, k) * yyt(k, l);
        acc += o_kl / (spec.eigenvalues[static_cast<std::size_t>(k)] -
                       spec.eigenvalues[static_cast<std::size_t>(l)]) /
               static_cast<double>(n);
      }
      drift[static_cast<std::size_t>(k)] = acc;
    }

    const std::vector<Complex> prev_ev = spec.eigenvalues;
    ou_step(g, config, rng);
    Spectrum next;
    EigenSystem next_sys;
    try {
      std::tie(next, next_sys) = eigendecompose(g);
    } catch (const DegenerateSpectrum&) {
      break;
    }
    const MatchOutcome m = match_spectra(prev_ev, next.eigenvalues, 1.5);
    if (m.ambiguous) break;

    for (int k = 0; k < n; ++k) {
      const Complex inc =
          next.eigenvalues[static_cast<std::size_t>(m.assignment[static_cast<std::size_t>(k)])] -
          prev_ev[static_cast<std::size_t>(k)];
      if (std::abs(prev_ev[static_cast<std::size_t>(k)].imag()) <= real_tol)
        rep.max_imag_increment_real_axis =
            std::max(rep.max_imag_increment_real_axis, std::abs(inc.imag()));
      const Complex resid = inc - drift[static_cast<std::size_t>(k)] * config.dt;
      residual_sum += resid;
      naive_residual_sum += inc + 0.5 * prev_ev[static_cast<std::size_t>(k)] * config.dt;
      residual_norm_sum += std::abs(resid);
      residual_sq_sum += std::norm(resid);
      predicted_var_sum += diag[static_cast<std::size_t>(k)] * config.dt / n;
      ++residual_count;
    }
    ++rep.steps;
  }
  if (residual_count > 0) {
    rep.mean_residual_norm = residual_norm_sum / residual_count;
    rep.residual_mean_abs = std::abs(residual_sum) / residual_count;
    rep.residual_mean_abs_naive = std::abs(naive_residual_sum) / residual_count;
    rep.residual_cov_ratio = residual_sq_sum / predicted_var_sum;
  }
  return rep;
}

}  // namespace gin
