#pragma once

#include "config.hpp"

namespace gin::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertionFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBackendFailure = 3;

/// Dispatches the configured experiment, writes its artifacts (CSVs,
/// summary.json, manifest.json, plot series) under the output directory, and
/// returns the process exit code.
int run(const ExperimentConfig& config);

}  // namespace gin::cli
