#include <benchmark/benchmark.h>

#include "gsw/measures.hpp"
#include "gsw/specialfn.hpp"

namespace {

void BM_Ein(benchmark::State& state) {
  const double z = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gsw::ein(z));
}
BENCHMARK(BM_Ein)->Arg(-50)->Arg(-20)->Arg(-1)->Arg(1)->Arg(20)->Arg(50);

void BM_Gram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = gsw::sample({gsw::Gaussian{{}, 1.0}, 5}, n, {1, 0});
  const gsw::KernelParams params(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gsw::gram(m.points(), params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_Gram)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

}  // namespace
