#include <benchmark/benchmark.h>

#include <vector>

#include "ttl/brownian.hpp"
#include "ttl/capacity.hpp"
#include "ttl/grid.hpp"
#include "ttl/polyline_index.hpp"
#include "ttl/rigidity.hpp"
#include "ttl/spectral.hpp"

namespace {

void BM_SamplePath(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ttl::sample_path(m, 1.0, 1e-4, {1, k++}));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SamplePath)->Arg(2)->Arg(3)->Arg(5);

void BM_TorusIndexQuery(benchmark::State& state) {
  ttl::SampledPath p = ttl::sample_path(3, 1.0, 1e-3, {2, 0});
  ttl::TorusIndex index(p);
  ttl::Rng rng({2, 1});
  double x[3];
  for (auto _ : state) {
    for (double& v : x) v = rng.uniform();
    benchmark::DoNotOptimize(index.distance(x));
  }
}
BENCHMARK(BM_TorusIndexQuery);

void BM_DistanceField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ttl::SampledPath p = ttl::sample_path(2, 4.0, 1e-3, {3, 0});
  for (auto _ : state) benchmark::DoNotOptimize(ttl::distance_field(p, n));
}
BENCHMARK(BM_DistanceField)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_TorsionGrid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ttl::SampledPath p = ttl::sample_path(2, 1.0, 1e-3, {4, 0});
  ttl::Obstacle ob = ttl::sausage_obstacle(p, 0.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(ttl::torsion_grid(ob));
}
BENCHMARK(BM_TorsionGrid)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Lambda1Square(benchmark::State& state) {
  ttl::Obstacle ob = ttl::dyadic_square_obstacle(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(ttl::lambda1_grid(ob));
}
BENCHMARK(BM_Lambda1Square)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_CapHitting(benchmark::State& state) {
  ttl::Sausage s{ttl::sample_path(3, 1.0, 1e-3, {5, 0}), 0.1};
  ttl::HittingConfig hc;
  hc.n = 2000;
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ttl::cap_hitting(s, hc, {5, ++k}));
  state.SetItemsProcessed(state.iterations() * hc.n);
}
BENCHMARK(BM_CapHitting)->Unit(benchmark::kMillisecond);

void BM_TorsionWos(benchmark::State& state) {
  ttl::Sausage s{ttl::sample_path(3, 1.0, 1e-3, {6, 0}), 0.05};
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ttl::torsion_wos(s, 3, 1e-3, 1000, 1, {6, ++k}));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_TorsionWos)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
