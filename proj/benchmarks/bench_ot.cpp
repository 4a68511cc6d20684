#include <benchmark/benchmark.h>

#include "gsw/measures.hpp"
#include "gsw/ot.hpp"

namespace {

gsw::DistributionSpec cube(std::size_t d) { return {gsw::UniformCube{1.0, {}}, d}; }

void BM_NetworkSimplex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = gsw::sample(cube(5), n, {1, 0});
  const auto b = gsw::sample(cube(5), n, {2, 0});
  const gsw::OTConfig cfg{2.0, gsw::ExactLp{n * n}};
  for (auto _ : state) benchmark::DoNotOptimize(gsw::wasserstein_discrete(a, b, cfg).cost);
}
BENCHMARK(BM_NetworkSimplex)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_Sinkhorn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = gsw::sample(cube(2), n, {1, 0});
  const auto b = gsw::sample(cube(2), n, {2, 0});
  const gsw::OTConfig cfg{2.0, gsw::Sinkhorn{0.05, 10000, 1e-6}};
  for (auto _ : state) benchmark::DoNotOptimize(gsw::wasserstein_discrete(a, b, cfg).cost);
}
BENCHMARK(BM_Sinkhorn)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_Quantile(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = gsw::sample(cube(1), n, {1, 0});
  const auto b = gsw::sample(cube(1), n, {2, 0});
  for (auto _ : state) benchmark::DoNotOptimize(gsw::wasserstein_1d(a, b, 2.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Quantile)->RangeMultiplier(4)->Range(256, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_SmoothW1d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = gsw::sample(cube(1), n, {1, 0});
  const auto b = gsw::sample(cube(1), n, {2, 0});
  const gsw::OTConfig cfg{1.0, gsw::QuantileMethod{}};
  for (auto _ : state) benchmark::DoNotOptimize(gsw::smooth_wasserstein(a, b, 0.1, cfg, 16, {3, 0}));
}
BENCHMARK(BM_SmoothW1d)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

}  // namespace
