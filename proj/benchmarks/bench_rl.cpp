#include <benchmark/benchmark.h>

#include <random>

#include "fasim/rl/policy.hpp"

namespace {

using namespace fasim::rl;

void BM_PolicySample(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int ds = 14, da = 10;
  GaussianPolicy pol(ds, 256, Eigen::VectorXd::Constant(da, -1.0),
                     Eigen::VectorXd::Constant(da, 1.0), -1.5, rng);
  const Eigen::VectorXd s = Eigen::VectorXd::Random(ds);
  for (auto _ : state) benchmark::DoNotOptimize(pol.sample(s, rng));
}
BENCHMARK(BM_PolicySample);

void BM_LogProbGrad(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int ds = 14, da = 10;
  GaussianPolicy pol(ds, 256, Eigen::VectorXd::Constant(da, -1.0),
                     Eigen::VectorXd::Constant(da, 1.0), -1.5, rng);
  const Eigen::VectorXd s = Eigen::VectorXd::Random(ds);
  const auto sample = pol.sample(s, rng);
  PolicyGrad grad = pol.zero_grad();
  for (auto _ : state) {
    benchmark::DoNotOptimize(pol.log_prob_with_grad(s, sample.u, 1.0, grad));
  }
}
BENCHMARK(BM_LogProbGrad);

}  // namespace
