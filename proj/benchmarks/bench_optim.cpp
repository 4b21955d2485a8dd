#include <benchmark/benchmark.h>

#include <random>

#include "fasim/optim.hpp"

namespace {

using namespace fasim;

std::vector<ChannelVector> random_channels(int k, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<ChannelVector> h(k, ChannelVector(n));
  for (auto& hk : h)
    for (int i = 0; i < n; ++i) hk[i] = Complex{g(rng), g(rng)};
  return h;
}

void BM_Wmmse(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto h = random_channels(k, k + 1, 42);
  for (auto _ : state) benchmark::DoNotOptimize(wmmse(h, 1.0, 1e-2));
}
BENCHMARK(BM_Wmmse)->Arg(1)->Arg(2)->Arg(4);

void BM_SumRate(benchmark::State& state) {
  const auto h = random_channels(4, 4, 7);
  BeamformingSet w;
  for (const auto& hk : h) w.vectors.push_back(hk * 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(sum_rate(h, w, 1e-2));
}
BENCHMARK(BM_SumRate);

}  // namespace
