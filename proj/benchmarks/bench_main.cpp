#include <benchmark/benchmark.h>

#include <vector>

#include "bmlab/diagrams.hpp"
#include "bmlab/hermite.hpp"
#include "bmlab/malliavin.hpp"
#include "bmlab/metrics.hpp"
#include "bmlab/paths.hpp"
#include "bmlab/rng.hpp"

using namespace bmlab;

namespace {

void BM_gaussian_stream(benchmark::State& state) {
  auto rng = CounterRng::substream(7, "bench", 0);
  double acc = 0.0;
  for (auto _ : state) acc += rng.next_gaussian();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_gaussian_stream);

void BM_eval_series(benchmark::State& state) {
  auto s = hermite::catalog("abs", 24);
  auto rng = CounterRng::substream(7, "bench", 1);
  std::vector<double> x(1024);
  for (auto& v : x) v = rng.next_gaussian();
  for (auto _ : state) {
    double acc = 0.0;
    for (double v : x) acc += hermite::eval_series(s, v);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_eval_series);

void BM_simulate(benchmark::State& state) {
  auto model = paths::CovarianceModel::fgn_increment(0.7);
  long long n = state.range(0);
  for (auto _ : state) {
    auto e = paths::simulate(model, n, 8, 42);
    benchmark::DoNotOptimize(e.data.data());
  }
  state.SetItemsProcessed(state.iterations() * n * 8);
}
BENCHMARK(BM_simulate)->Arg(1 << 10)->Arg(1 << 14);

void BM_inner_DF_u(benchmark::State& state) {
  auto s = hermite::catalog("H2", 8);
  auto model = paths::CovarianceModel::ar1(0.5);
  long long n = state.range(0);
  auto e = paths::simulate(model, n, 16, 42);
  for (auto _ : state) {
    auto v = malliavin::inner_DF_u(e, s, model);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_inner_DF_u)->Arg(256)->Arg(2048);

void BM_product_moment(benchmark::State& state) {
  std::vector<int> q = {3, 3, 2, 2};
  std::vector<double> corr = {1.0, 0.5,  0.25, -0.1, 0.5,  1.0,  0.3, 0.2,
                              0.25, 0.3, 1.0,  0.4,  -0.1, 0.2,  0.4, 1.0};
  for (auto _ : state) {
    double m = diagrams::product_moment(q, corr);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_product_moment);

void BM_wasserstein(benchmark::State& state) {
  auto rng = CounterRng::substream(7, "bench", 2);
  std::vector<double> z(static_cast<std::size_t>(state.range(0)));
  for (auto& v : z) v = rng.next_gaussian();
  for (auto _ : state) {
    auto d = metrics::dist_wasserstein(z);
    benchmark::DoNotOptimize(d.value);
  }
}
BENCHMARK(BM_wasserstein)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
