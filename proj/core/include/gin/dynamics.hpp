#pragma once

#include <vector>

#include "gin/rng.hpp"
#include "gin/spectral.hpp"
#include "gin/types.hpp"

namespace gin {

enum class FlowKind { complex_ou, real_ou };
enum class StepScheme {
  euler,  // G <- G (1 - dt/2) + dB/sqrt(N), per-entry noise variance dt
  exact   // G <- G e^{-dt/2} + noise of variance (1 - e^{-dt})/N
};

struct FlowConfig {
  int n = 0;
  double dt = 0.0;
  int steps = 0;
  FlowKind kind = FlowKind::complex_ou;
  StepScheme scheme = StepScheme::exact;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;  // 0 turns the flow into the deterministic decay
};

/// One in-place update of the Ornstein-Uhlenbeck entry flow.
void ou_step(ComplexMatrix& g, const FlowConfig& config, RngStream& rng);

/// Full trajectory including the initial matrix: steps+1 entries.
std::vector<ComplexMatrix> evolve_ou(const ComplexMatrix& g0, const FlowConfig& config,
                                     RngStream& rng);

/// Labeled eigenvalue trajectories. positions[s][k] is path k at step s; a
/// step with an ambiguous assignment truncates all paths (matched = false from
/// that step on, velocities never jump silently).
struct EigenPath {
  std::vector<double> times;
  std::vector<std::vector<Complex>> positions;    // positions[step][path]
  std::vector<std::vector<double>> diag_overlap;  // O_kk along each path
  std::vector<bool> matched;                      // per step
  int rejected_steps = 0;                         // degenerate-spectrum steps
  int valid_steps() const;                        // steps before first failure
};

/// What to do when the nearest-neighbor ratio test is ambiguous: stop the
/// paths there (default; downstream statistics use the clean prefix), or keep
/// going with the optimal assignment while still recording the flags.
/// Truncation conditions the ensemble on quiet configurations, so estimators
/// whose prediction does not share that conditioning (the mean-square
/// displacement) must use the resolve policy.
enum class MatchPolicy { truncate, resolve };

/// Greedy nearest-neighbor matching between consecutive spectra with an
/// ambiguity ratio of 1.5, falling back to an optimal assignment when any
/// ambiguity flag fires.
EigenPath track_eigenvalue_paths(const std::vector<ComplexMatrix>& sequence, double dt,
                                 double ambiguity_ratio = 1.5,
                                 MatchPolicy policy = MatchPolicy::truncate);

/// Tracking plus the per-step overlap matrices permuted into path-label order
/// (what the bracket comparison consumes).
struct TrackedFlow {
  EigenPath path;
  std::vector<ComplexMatrix> overlaps;  // one per step while matched
};
TrackedFlow track_flow(const std::vector<ComplexMatrix>& sequence, double dt,
                       bool keep_overlaps, double ambiguity_ratio = 1.5,
                       MatchPolicy policy = MatchPolicy::truncate);

/// Minimum-cost perfect matching on a square cost matrix (Hungarian).
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

struct BracketReport {
  ComplexMatrix realized;        // sum_s dl_i conj(dl_j)
  ComplexMatrix predicted;       // sum_s O_ij dt / N
  ComplexMatrix non_conjugated;  // sum_s dl_i dl_j (no conjugation)
  double diag_ratio = 0.0;       // pooled realized / predicted on the diagonal
  double non_conj_ratio = 0.0;   // pooled |non-conjugated| / predicted diagonal scale
};

/// Realized covariation of the tracked paths against the overlap-driven
/// prediction. Uses only the matched prefix; throws InsufficientSteps if it is
/// shorter than min_steps.
BracketReport empirical_brackets(const TrackedFlow& flow, double dt, int min_steps = 100);

struct MsdResult {
  double empirical = 0.0;   // mean over trials and eigenvalues of |dl|^2 1_ball
  double predicted = 0.0;   // t * integral_ball (1 - |z|^2) dm / pi
  long paths_used = 0;
  long eigenvalues_in_ball = 0;
};

/// Mean-square displacement after time t of eigenvalues starting inside a
/// ball, for an ensemble of stationary flows. Each trial evolves a fresh
/// Ginibre start over `substeps` exact OU steps with path tracking.
MsdResult diffusive_msd(int n, double t, int substeps, int trials, Complex ball_center,
                        double ball_radius, std::uint64_t seed, int workers = 1);

struct RealDriftReport {
  long steps = 0;
  long real_eigenvalues = 0;
  double max_imag_increment_real_axis = 0.0;  // |Im dl| over real eigenvalues
  double mean_residual_norm = 0.0;  // |dl - drift dt| averaged, should be O(sqrt(dt/N))
  double residual_mean_abs = 0.0;   // |mean residual|, should be O(dt)
  double residual_mean_abs_naive = 0.0;  // same with the interaction drift omitted
  double residual_cov_ratio = 0.0;  // sum |residual|^2 over sum O_kk dt / N
  std::vector<double> collision_times;
  int real_count_changes = 0;
};

/// Real-flow drift check: per-step increments minus the predicted drift
///   sum_{l != k} O_{k lbar} / (l_k - l_l) - l_k / 2,
/// with conjugate-pair collisions flagged when |Im l| < 10 sqrt(dt O_kk / N).
RealDriftReport real_flow_drift_check(const ComplexMatrix& g0, const FlowConfig& config,
                                      RngStream& rng);

}  // namespace gin
