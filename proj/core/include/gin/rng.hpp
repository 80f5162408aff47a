#pragma once

#include <complex>
#include <cstdint>

namespace gin {

/// Counter-split random stream: (root_seed, stream_index) fully determines the
/// draw sequence, and distinct stream indices give statistically independent
/// streams. One stream per Monte Carlo trial; streams are never shared.
///
/// The generator is xoshiro256++ with state expanded from the two identity
/// words by SplitMix64, so trial k of a run can be reproduced in isolation.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_index);

  std::uint64_t root_seed() const { return root_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform();
  /// Uniform on (0, 1); safe to feed to log().
  double uniform_open();
  /// Uniform on (0, 2*pi).
  double angle();

  /// Standard real Gaussian (Box-Muller on two uniforms; spare value cached).
  double normal();

  /// Standard complex Gaussian, E X = E X^2 = 0 and E|X|^2 = 1.
  /// Sampled as sqrt(-log U) * exp(i theta), the polar form of (N1+iN2)/sqrt(2).
  std::complex<double> complex_normal();

  /// Exponential with unit mean.
  double exponential();

  /// Gamma(k) for integer shape k >= 1: sum of exponentials for k <= 32,
  /// Marsaglia-Tsang rejection above.
  double gamma_int(std::uint64_t k);

  /// Gamma(alpha) for real shape alpha >= 1 (Marsaglia-Tsang).
  double gamma_mt(double alpha);

 private:
  std::uint64_t root_seed_;
  std::uint64_t stream_index_;
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace gin
