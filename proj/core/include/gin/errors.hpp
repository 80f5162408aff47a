#pragma once

#include <stdexcept>
#include <string>

namespace gin {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigendecomposition backend failed to converge.
struct NonConvergence : Error {
  using Error::Error;
};

// Spectrum has a gap below the rejection floor; the sample must be discarded.
struct DegenerateSpectrum : Error {
  using Error::Error;
};

// A pairwise eigenvalue distance required by a quenched formula is below floor.
struct GapTooSmall : Error {
  using Error::Error;
};

// The pair separation delta = N|l1-l2|^2 is below the floor for second moments.
struct DeltaDegenerate : Error {
  using Error::Error;
};

struct ArgumentTooLarge : Error {
  using Error::Error;
};

struct EmptyWindow : Error {
  using Error::Error;
};

struct InsufficientSamples : Error {
  using Error::Error;
};

struct InsufficientSteps : Error {
  using Error::Error;
};

struct ToleranceNotReached : Error {
  using Error::Error;
};

struct CollisionDetected : Error {
  using Error::Error;
};

struct ConfigInvalid : Error {
  using Error::Error;
};

}  // namespace gin
