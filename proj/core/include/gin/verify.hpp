#pragma once

#include <string>
#include <vector>

namespace gin {

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;  // relative unless the reference is ~0, then absolute
  double tol = 0.0;
  bool pass = false;
};

/// The full independent-verification battery: tridiagonal closed forms,
/// recurrence identities, disk-integral identities, kernel trace,
/// moment-matrix normalizations, and the small-N second-moment quadrature
/// cross-check.
std::vector<OracleCheck> run_oracle_suite();

}  // namespace gin
