#include <benchmark/benchmark.h>

#include "infnoise/experiment.hpp"
#include "infnoise/kernels.hpp"
#include "infnoise/oracle.hpp"
#include "infnoise/sampling.hpp"

namespace {

using namespace infnoise;

DataSet make_dataset(int n, int p, std::uint64_t seed = 1) {
  SignalModel sig;
  sig.family = SignalFamily::CircleEmbed;
  sig.ambient_dim = p;
  NoiseModel noise;
  noise.family = NoiseFamily::GaussianLike;
  noise.dimension = p;
  return assemble_dataset(sig, noise, RadiusModel{}, n, seed);
}

void BM_SampleNoise(benchmark::State& state) {
  NoiseModel m;
  m.family = static_cast<NoiseFamily>(state.range(0));
  m.dimension = 512;
  if (m.family == NoiseFamily::LpBall) m.b_exponent = 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_noise(m, 64, 7));
  }
}
BENCHMARK(BM_SampleNoise)
    ->Arg(static_cast<int>(NoiseFamily::GaussianLike))
    ->Arg(static_cast<int>(NoiseFamily::SphereUniform))
    ->Arg(static_cast<int>(NoiseFamily::LpBall))
    ->Arg(static_cast<int>(NoiseFamily::GaussianCopula));

void BM_KernelMatrix(benchmark::State& state) {
  const DataSet ds = make_dataset(static_cast<int>(state.range(0)),
                                  static_cast<int>(state.range(1)));
  const KernelSpec f = KernelSpec::gaussian(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_matrix(ds, f));
  }
}
BENCHMARK(BM_KernelMatrix)->Args({50, 500})->Args({100, 1000})->Args({200, 2000});

void BM_ApproxElliptical(benchmark::State& state) {
  RadiusModel two;
  two.family = RadiusFamily::TwoPoint;
  two.r_inf = 0.6;
  two.r_sup = 1.4;
  SignalModel sig;
  sig.family = SignalFamily::CircleEmbed;
  sig.ambient_dim = 1000;
  NoiseModel noise;
  noise.family = NoiseFamily::SphereUniform;
  noise.dimension = 1000;
  const DataSet ds = assemble_dataset(sig, noise, two, static_cast<int>(state.range(0)), 3);
  const KernelSpec f = KernelSpec::gaussian(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(approx_matrix_elliptical(ds, f));
  }
}
BENCHMARK(BM_ApproxElliptical)->Arg(50)->Arg(100);

void BM_Eigh(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DataSet ds = make_dataset(n, 200);
  const SymMatrix m = kernel_matrix(ds, KernelSpec::gaussian(1.0)).matrix;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigh(m));
  }
}
BENCHMARK(BM_Eigh)->Arg(50)->Arg(200)->Arg(400);

void BM_MaxInterpointDev(benchmark::State& state) {
  const DataSet ds = make_dataset(50, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_interpoint_dev(ds));
  }
}
BENCHMARK(BM_MaxInterpointDev)->Arg(500)->Arg(2000);

void BM_FullTrial(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.signal.family = SignalFamily::CircleEmbed;
  cfg.noise.family = NoiseFamily::GaussianLike;
  cfg.kernel = KernelSpec::gaussian(1.0);
  cfg.grid = {{40, static_cast<int>(state.range(0))}};
  cfg.replications = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(cfg));
  }
}
BENCHMARK(BM_FullTrial)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
