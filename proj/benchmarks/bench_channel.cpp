#include <benchmark/benchmark.h>

#include <random>

#include "fasim/radiomap.hpp"

namespace {

using namespace fasim;

Layout staircase(int steps) {
  auto h = [](int i) { return 3.0 + 0.7 * (i % 2); };
  std::vector<Point> corners;
  corners.push_back({0, 0});
  corners.push_back({0, h(0)});
  for (int i = 1; i < steps; ++i) {
    corners.push_back({2.0 * i, h(i - 1)});
    corners.push_back({2.0 * i, h(i)});
  }
  corners.push_back({2.0 * steps, h(steps - 1)});
  corners.push_back({2.0 * steps, 0.0});
  return Layout(std::move(corners), std::vector<double>(corners.size(), 5.24));
}

void BM_IndicatorFunctions(benchmark::State& state) {
  const Layout layout = staircase(static_cast<int>(state.range(0)));
  const Point tx{1.0, 1.0}, rx{2.0 * state.range(0) - 1.0, 1.5};
  for (auto _ : state) benchmark::DoNotOptimize(indicator_functions(layout, tx, rx));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(layout.wall_count()));
}
BENCHMARK(BM_IndicatorFunctions)->Arg(1)->Arg(2)->Arg(3)->Arg(4)->Arg(5)->Complexity();

void BM_ChannelCoefficient(benchmark::State& state) {
  const Layout layout = staircase(3);
  RadioParams params;
  const Point tx{1.0, 1.0}, rx{4.5, 1.5};
  for (auto _ : state) benchmark::DoNotOptimize(channel_coefficient(layout, params, tx, rx));
}
BENCHMARK(BM_ChannelCoefficient);

void BM_ImageMethod(benchmark::State& state) {
  const Layout layout = staircase(3);
  RadioParams params;
  const Point tx{1.0, 1.0}, rx{4.5, 1.5};
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(image_method_reference(layout, params, tx, rx, order));
}
BENCHMARK(BM_ImageMethod)->Arg(1)->Arg(2)->Arg(3);

void BM_PathLossMap(benchmark::State& state) {
  const Layout layout = staircase(2);
  RadioParams params;
  for (auto _ : state)
    benchmark::DoNotOptimize(path_loss_map(layout, params, {1.0, 1.0}, 0.1, 1));
}
BENCHMARK(BM_PathLossMap);

}  // namespace
