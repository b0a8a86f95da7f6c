#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ckam/expression.hpp"
#include "ckam/grid.hpp"
#include "ckam/model.hpp"
#include "ckam/weak_kam.hpp"

using namespace ckam;

namespace {

ContactModel cosine() {
  return ContactModel(Theta::linear(1.0), Profile::constant(1.0),
                      Profile::from_expression(parse_expression("cos(2*pi*x)")));
}

GridMeasure random_measure(const PeriodicGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.0, 1.0);
  std::vector<double> weights(static_cast<std::size_t>(g.size()));
  for (auto& x : weights) x = w(rng);
  return GridMeasure::normalized(g, weights);
}

void BM_BackwardStep(benchmark::State& state) {
  PeriodicGrid g(static_cast<int>(state.range(0)));
  const auto model = cosine();
  const auto data = FrozenData::build(model, Coupling::none(), GridMeasure::uniform(g));
  const auto cfg = SemigroupConfig::defaults(model, Coupling::none(), g);
  auto u = GridFunction::sample(g, [](double x) { return 0.1 * std::sin(2 * std::numbers::pi * x); });
  for (auto _ : state) {
    u = backward_step(u, data, cfg);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_BackwardStep)->RangeMultiplier(2)->Range(128, 1024);

void BM_SolveUMinus(benchmark::State& state) {
  PeriodicGrid g(static_cast<int>(state.range(0)));
  const auto model = cosine();
  const auto data = FrozenData::build(model, Coupling::none(), GridMeasure::uniform(g));
  const auto cfg = SemigroupConfig::defaults(model, Coupling::none(), g);
  for (auto _ : state) {
    auto sol = solve_u_minus(data, GridFunction::constant(g, 0.0), cfg);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolveUMinus)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond);

void BM_WassersteinDistance(benchmark::State& state) {
  PeriodicGrid g(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  const auto a = random_measure(g, rng), b = random_measure(g, rng);
  for (auto _ : state) benchmark::DoNotOptimize(d1_distance(a, b));
}
BENCHMARK(BM_WassersteinDistance)->RangeMultiplier(4)->Range(64, 4096);

}  // namespace
BENCHMARK_MAIN();
