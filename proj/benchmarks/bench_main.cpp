#include <benchmark/benchmark.h>

#include <random>

#include "blackout/cascade.hpp"
#include "blackout/credibility.hpp"
#include "blackout/matpower.hpp"
#include "blackout/optimizer.hpp"
#include "blackout/risk.hpp"
#include "blackout/sample_set.hpp"

using namespace blackout;

namespace {

const Network& case57() {
  static const Network net = load_matpower(std::string(BLACKOUT_BENCH_DATA_DIR) + "/case57.m");
  return net;
}

const Network& case300() {
  static const Network net = load_matpower(std::string(BLACKOUT_BENCH_DATA_DIR) + "/case300.m");
  return net;
}

// K x N factors with every sample contributing, the worst case for evaluation.
RiskMatrices dense_matrices(std::size_t k, std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<int> ids(k);
  for (std::size_t j = 0; j < k; ++j) ids[j] = static_cast<int>(j + 1);
  std::vector<double> shed(n), p(k * n), q(k * n);
  for (auto& s : shed) s = 1.0 + 100.0 * u(rng);
  for (std::size_t j = 0; j < k * n; ++j) {
    p[j] = u(rng);
    q[j] = p[j] * u(rng);
  }
  return make_matrices(ids, shed, p, q, 0.0);
}

void BM_Cascade57(benchmark::State& state) {
  const CascadeSimulator sim(case57(), FailureModel::for_network(case57()));
  std::uint64_t i = 0;
  for (auto _ : state) {
    RandomStream rng(1, i++);
    benchmark::DoNotOptimize(sim.simulate(rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Cascade57);

void BM_Cascade300(benchmark::State& state) {
  const CascadeSimulator sim(case300(), FailureModel::for_network(case300()));
  std::uint64_t i = 0;
  for (auto _ : state) {
    RandomStream rng(1, i++);
    benchmark::DoNotOptimize(sim.simulate(rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Cascade300)->Unit(benchmark::kMillisecond);

void BM_GenerateSamples57(benchmark::State& state) {
  const CascadeSimulator sim(case57(), FailureModel::for_network(case57()));
  const auto workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_samples(sim, 10000, 3, workers));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_GenerateSamples57)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_StrategyRisk(benchmark::State& state) {
  static const RiskMatrices m = dense_matrices(107, 100000);
  Strategy s;
  for (int j = 0; j < state.range(0); ++j) s.maintained.push_back(1 + 25 * j);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_risk_strategy(m, s));
}
BENCHMARK(BM_StrategyRisk)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_StrategyCredibility(benchmark::State& state) {
  static const RiskMatrices m = dense_matrices(107, 100000);
  const Strategy s{{1, 26, 51, 76}};
  for (auto _ : state) benchmark::DoNotOptimize(credibility_report(m, s, 0.95, 0.1));
}
BENCHMARK(BM_StrategyCredibility)->Unit(benchmark::kMicrosecond);

void BM_Sensitivity(benchmark::State& state) {
  static const RiskMatrices m = dense_matrices(107, 100000);
  for (auto _ : state) benchmark::DoNotOptimize(sensitivity_report(m));
}
BENCHMARK(BM_Sensitivity)->Unit(benchmark::kMillisecond);

void BM_Greedy(benchmark::State& state) {
  static const RiskMatrices m = dense_matrices(107, 20000);
  OptimizerConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(algorithm_two(m, cfg));
}
BENCHMARK(BM_Greedy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
