// Serial reference kernels against their OpenMP counterparts, plus the
// exchange solver's scaling in n at fixed rank.
#include <benchmark/benchmark.h>

#include "cheblr/alternance.hpp"
#include "cheblr/altmin.hpp"
#include "cheblr/matgen.hpp"
#include "cheblr/rng.hpp"
#include "cheblr/uniform.hpp"

namespace {

using namespace cheblr;

struct PhiInput {
  Matrix a;
  Matrix v;
};

PhiInput phi_input(std::size_t n, std::size_t r) {
  Rng rng(derive_seed(42, n * 131 + r));
  return {gaussian_matrix(n, n, rng), gaussian_matrix(n, r, rng)};
}

void BM_PhiSerial(benchmark::State& state) {
  const auto in = phi_input(static_cast<std::size_t>(state.range(0)),
                            static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::phi(in.a, in.v));
}

void BM_PhiParallel(benchmark::State& state) {
  const auto in = phi_input(static_cast<std::size_t>(state.range(0)),
                            static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(phi(in.a, in.v));
}

void BM_ExtremeSetSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = phi_input(n, 8);
  const Matrix u = phi(in.a, in.v);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::compute_extreme_set(in.a, u, in.v, kIterativeTol));
}

void BM_ExtremeSetParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = phi_input(n, 8);
  const Matrix u = phi(in.a, in.v);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_extreme_set(in.a, u, in.v, kIterativeTol));
}

void BM_SolveUniform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(derive_seed(7, n));
  const Matrix v = gaussian_matrix(n, 8, rng);
  const Vector a = gaussian_vector(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_uniform(v, a));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}

void BM_AltMinIdentity(benchmark::State& state) {
  const Matrix a = identity(128);
  AltMinOptions opts;
  opts.max_iter = 20;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(
          alternating_minimization(a, static_cast<std::size_t>(state.range(0)), {}, opts));
    } catch (const std::exception& e) {
      state.SkipWithError(e.what());
      break;
    }
  }
}

}  // namespace

BENCHMARK(BM_PhiSerial)->Args({128, 4})->Args({256, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PhiParallel)->Args({128, 4})->Args({256, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtremeSetSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtremeSetParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveUniform)
    ->RangeMultiplier(2)
    ->Range(1024, 8192)
    ->Unit(benchmark::kMicrosecond)
    ->Complexity();
BENCHMARK(BM_AltMinIdentity)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
