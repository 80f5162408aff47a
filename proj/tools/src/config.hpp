#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "gin/ensembles.hpp"

namespace gin::cli {

enum class Experiment {
  diag_distribution,
  offdiag_mean,
  second_moments,
  pseudospectrum,
  dynamics,
  angles,
  extremes,
  formulas,
  verify,
  universality,
};

Experiment experiment_from_string(const std::string& s);
std::string to_string(Experiment e);
EnsembleKind ensemble_from_string(const std::string& s);
std::string to_string(EnsembleKind k);

/// Validated experiment description. Parsed from a flat key=value file plus
/// command-line overrides; unknown keys are rejected with the offending name.
struct ExperimentConfig {
  Experiment experiment = Experiment::verify;
  EnsembleKind ensemble = EnsembleKind::complex_gaussian;
  int n = 100;
  long trials = 100;
  std::uint64_t seed = 0;
  bool seed_from_entropy = false;  // true when no seed was given anywhere
  int workers = 0;                 // 0 = hardware concurrency
  std::string output_dir = "out";

  // windows / bands
  double window_center_re = 0.0;
  double window_center_im = 0.0;
  double window_c = 0.3;      // disk radius coefficient, r = c N^{-1/2}
  double omega_lo = 1.0;
  double omega_hi = 2.0;
  double bulk_radius = 0.8;
  double ball_radius = 0.25;  // pseudospectrum / msd ball
  double epsilon = 1e-6;      // pseudospectrum epsilon

  // dynamics
  double dt = 1e-5;
  int steps = 2000;
  int msd_substeps = 25;
  double msd_time = 0.0;  // 0 = skip the msd stage

  // extremes exponents
  double eps_lower = 0.5;
  double eps_upper = 0.1;

  // formulas tabulation
  std::string function = "mean_diag_exact";
  double grid_lo = 0.0;
  double grid_hi = 1.0;
  int grid_points = 64;

  // optional assertions; unset means "report only"
  std::optional<double> assert_ks;
  std::optional<double> assert_rel_err;
  std::optional<double> assert_ratio_lo;
  std::optional<double> assert_ratio_hi;

  int resolved_workers() const;
};

/// Parses `key=value` lines ('#' comments, blank lines allowed). Every key
/// must be known; values must parse; invariants (n >= 1, trials >= 1, ...)
/// are checked after overrides are applied.
ExperimentConfig parse_config(const std::string& path,
                              const std::map<std::string, std::string>& overrides);

/// Same validation path for a pure flag run (no file).
ExperimentConfig config_from_overrides(const std::map<std::string, std::string>& overrides);

/// The config echo used by the manifest: every key in file format.
std::string config_to_text(const ExperimentConfig& c);

}  // namespace gin::cli
