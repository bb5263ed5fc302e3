#include <benchmark/benchmark.h>

#include "tphase/approx.hpp"
#include "tphase/geomean.hpp"
#include "tphase/phase.hpp"
#include "tphase/random.hpp"

using namespace tphase;

namespace {

void BM_TProduct(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto p = static_cast<Index>(state.range(1));
  Rng rng(derive_seed(1, 0));
  const Tensor3 a = random_tensor(n, n, p, rng);
  const Tensor3 b = random_tensor(n, n, p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(tprod(a, b));
}
BENCHMARK(BM_TProduct)->Args({4, 4})->Args({16, 16})->Args({32, 64});

// Same product through the dense block-circulant matrix, for comparison.
void BM_BcircProduct(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto p = static_cast<Index>(state.range(1));
  Rng rng(derive_seed(1, 1));
  const Tensor3 a = random_tensor(n, n, p, rng);
  const Tensor3 b = random_tensor(n, n, p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(CMatrix(bcirc(a) * unfold(b)));
}
BENCHMARK(BM_BcircProduct)->Args({4, 4})->Args({16, 16})->Args({32, 64});

void BM_CanonicalPhases(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  Rng rng(derive_seed(1, 2));
  const Tensor3 a = random_sectorial(n, 4, -0.5, 1.5, rng);
  for (auto _ : state) benchmark::DoNotOptimize(canonical_phases(a));
}
BENCHMARK(BM_CanonicalPhases)->Arg(2)->Arg(8)->Arg(16);

void BM_Geomean(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  Rng rng(derive_seed(1, 3));
  const Tensor3 a = random_accretive(n, 4, rng);
  const Tensor3 b = random_accretive(n, 4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(t_geomean(a, b));
}
BENCHMARK(BM_Geomean)->Arg(2)->Arg(8)->Arg(16);

void BM_TSVD(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  Rng rng(derive_seed(1, 4));
  const Tensor3 a = random_tensor(n, n, 8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(t_svd(a));
}
BENCHMARK(BM_TSVD)->Arg(4)->Arg(16)->Arg(32);

}  // namespace
BENCHMARK_MAIN();
