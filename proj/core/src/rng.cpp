#include "gin/rng.hpp"

#include <cmath>

namespace gin {
namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t stream_index)
    : root_seed_(root_seed), stream_index_(stream_index) {
  // Mix the stream counter into the seed before expanding, so streams with
  // nearby indices share no state structure.
  std::uint64_t x = root_seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1));
  x ^= rotl(stream_index, 17);
  for (auto& w : s_) w = splitmix64(x);
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::angle() { return kTwoPi * uniform_open(); }

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double t = angle();
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

std::complex<double> RngStream::complex_normal() {
  const double r = std::sqrt(-std::log(uniform_open()));
  const double t = angle();
  return {r * std::cos(t), r * std::sin(t)};
}

double RngStream::exponential() { return -std::log(uniform_open()); }

double RngStream::gamma_int(std::uint64_t k) {
  if (k <= 32) {
    // Exact for integer shape: sum of k unit exponentials, accumulated as a
    // single log of a product to halve the log() count.
    double prod = 1.0;
    double acc = 0.0;
    for (std::uint64_t i = 0; i < k; ++i) {
      prod *= uniform_open();
      if (prod < 0x1.0p-500) {  // keep the product away from underflow
        acc -= std::log(prod);
        prod = 1.0;
      }
    }
    return acc - std::log(prod);
  }
  return gamma_mt(static_cast<double>(k));
}

double RngStream::gamma_mt(double alpha) {
  // Marsaglia & Tsang (2000), valid for alpha >= 1.
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace gin
