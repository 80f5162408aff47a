#include <benchmark/benchmark.h>

#include <cstdlib>

#include "gin/ensembles.hpp"
#include "gin/formulas.hpp"
#include "gin/schur_chain.hpp"
#include "gin/spectral.hpp"

using namespace gin;

namespace {

Spectrum ring_spectrum(int n) {
  std::vector<Complex> ev{Complex(0.0), Complex(0.4 / std::sqrt(static_cast<double>(n)), 0.0)};
  for (int k = 2; k < n; ++k) {
    const double a = 2.0 * 3.14159265358979324 * (k - 2 + 0.5) / (n - 2);
    ev.push_back(0.75 * Complex(std::cos(a), std::sin(a)));
  }
  return Spectrum::from(std::move(ev));
}

void BM_Eigendecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(1, 0);
  const ComplexMatrix g = sample_matrix({EnsembleKind::complex_gaussian, n, 0.0}, rng);
  for (auto _ : state) {
    auto sys = eigendecompose(g);
    benchmark::DoNotOptimize(sys);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Eigendecompose)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_Overlaps(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(2, 0);
  const ComplexMatrix g = sample_matrix({EnsembleKind::complex_gaussian, n, 0.0}, rng);
  const auto [sp, sys] = eigendecompose(g);
  for (auto _ : state) {
    auto o = overlaps(sys.X, sys.Y);
    benchmark::DoNotOptimize(o);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Overlaps)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_ChainOverlaps(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Spectrum sp = ring_spectrum(n);
  RngStream rng(3, 0);
  for (auto _ : state) {
    auto t = chain_overlaps(sp, rng);
    benchmark::DoNotOptimize(t);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ChainOverlaps)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_QuenchedDiagSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Spectrum sp = ring_spectrum(n);
  RngStream rng(4, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quenched_diag_sample(sp, rng));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_QuenchedDiagSample)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_SecondMomentExact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Complex z = 2.0 / std::sqrt(static_cast<double>(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(second_moment_exact_origin(n, z));
  }
}
BENCHMARK(BM_SecondMomentExact)->Arg(100)->Arg(10'000);

void BM_GinibreKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Complex z(0.3, 0.1), w(0.25, 0.12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ginibre_kernel(n, z, w));
  }
}
BENCHMARK(BM_GinibreKernel)->Arg(50)->Arg(500);

}  // namespace

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
