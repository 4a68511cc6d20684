#include <benchmark/benchmark.h>

#include "gsw/measures.hpp"
#include "gsw/mmd.hpp"

namespace {

void BM_D2Squared(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const gsw::DistributionSpec spec{gsw::Gaussian{{}, 0.5}, 3};
  const auto a = gsw::sample(spec, n, {1, 0});
  const auto b = gsw::sample(spec, n, {2, 0});
  const gsw::KernelParams params(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gsw::d2_squared(a, b, params).d2);
}
BENCHMARK(BM_D2Squared)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

// One bootstrap replicate: a quadratic form on the cached pooled Gram.
void BM_PooledQuadraticForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto z = gsw::sample({gsw::Gaussian{{}, 0.5}, 1}, 2 * n, {1, 0});
  const gsw::PooledGram gram(z.points(), gsw::KernelParams(0.1));
  gsw::Vector w = gsw::Vector::Constant(static_cast<Eigen::Index>(2 * n), 0.0);
  w.head(static_cast<Eigen::Index>(n)).setConstant(1.0 / static_cast<double>(n));
  w.tail(static_cast<Eigen::Index>(n)).setConstant(-1.0 / static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(gram.quadratic_form(w));
}
BENCHMARK(BM_PooledQuadraticForm)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

}  // namespace
