// Serial reference vs OpenMP kernels on the hot loops.

#include <benchmark/benchmark.h>

#include "dilation/catalog.hpp"
#include "dilation/measure.hpp"
#include "dilation/volume.hpp"

namespace {

using namespace dilation;

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_IteratedVolume(benchmark::State& state) {
  const auto system = make_system("standard_map", {{"K", 1.5}});
  const auto family = default_disk_family(system, 2, 0, 1);
  const auto grid = default_grid(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_iterated_volume(system, family.front(), 30, grid, exec_of(state)));
  }
}
BENCHMARK(BM_IteratedVolume)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Witness(benchmark::State& state) {
  const auto system = make_system("perturbed_cat");
  const auto family = default_disk_family(system, 1, 0, 1);
  const auto grid = default_grid(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(witness_point(system, family.front(), 1000, 1, grid, exec_of(state)));
  }
}
BENCHMARK(BM_Witness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_IntegrateLogNorm(benchmark::State& state) {
  const auto system = make_system("standard_map", {{"K", 1.5}});
  const auto measure = build_empirical_measure(system, Eigen::Vector2d(0.1, 0.2), 5000, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_log_norm(measure, system, 10, 1, 50.0, exec_of(state)));
  }
}
BENCHMARK(BM_IntegrateLogNorm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
