#include <vector>

#include <benchmark/benchmark.h>

#include "finsler/holonomy_algebra.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric_catalog.hpp"
#include "finsler/spray.hpp"
#include "finsler/transport.hpp"

using namespace finsler;

namespace {

// Product of two dense jets in 4 variables at the given order.
void BM_JetMultiply(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const JetLayout& layout = JetLayout::get(4);
  Jet a = Jet::constant(layout, order, 1.0), b = Jet::constant(layout, order, 2.0);
  for (int v = 0; v < 4; ++v) {
    a += Jet::variable(layout, order, v, 0.3 + 0.1 * v);
    b *= Jet::variable(layout, order, v, 1.0 - 0.2 * v);
  }
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_JetMultiply)->DenseRange(2, 8, 2);

void BM_SprayJets(benchmark::State& state) {
  const MetricSpec spec = make_funk();
  const std::vector<double> x{0.3, 0.1}, y{0.6, -0.8};
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(SprayJets(spec, x, y, order).P());
}
BENCHMARK(BM_SprayJets)->Arg(4)->Arg(5)->Arg(7);

void BM_TransportLoop(benchmark::State& state) {
  const MetricSpec spec = make_funk();
  const ChartCurve loop = ChartCurve::rectangle({0.1, 0.1}, {0.2, 0.0}, {0.0, 0.2});
  const std::vector<double> y{1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(transport_along(spec, loop, y, 1e-3).y_final);
}
BENCHMARK(BM_TransportLoop)->Unit(benchmark::kMillisecond);

void BM_GenerateAlgebra(benchmark::State& state) {
  const MetricSpec spec = make_funk();
  const std::vector<double> x{0.3, 0.1};
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_algebra(spec, x, depth).rounds.size());
}
BENCHMARK(BM_GenerateAlgebra)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
