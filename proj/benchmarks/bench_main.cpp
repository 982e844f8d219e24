#include <benchmark/benchmark.h>

#include "kfp/grid.hpp"
#include "kfp/norms.hpp"
#include "kfp/operators.hpp"
#include "kfp/solver.hpp"

namespace {

kfp::Field gaussian_state(const kfp::GridSpec& grid) {
  kfp::InitialDataSpec spec;
  spec.kind = kfp::InitialDataSpec::Kind::gaussian;
  return kfp::make_initial_data(spec, grid);
}

void bm_roundtrip(benchmark::State& state) {
  const auto grid = kfp::make_grid(static_cast<int>(state.range(0)), 12.0,
                                   static_cast<int>(state.range(1)));
  const kfp::Field u = gaussian_state(grid);
  for (auto _ : state) {
    auto c = kfp::to_spectral(u);
    auto back = kfp::to_physical(c);
    benchmark::DoNotOptimize(back.values.data());
  }
}
BENCHMARK(bm_roundtrip)->Args({1, 512})->Args({2, 128})->Args({3, 32});

void bm_apply(benchmark::State& state) {
  const auto grid = kfp::make_grid(static_cast<int>(state.range(0)), 12.0,
                                   static_cast<int>(state.range(1)));
  const auto params = kfp::make_operator_params(0.5, 0.5);
  const kfp::Field u = gaussian_state(grid);
  for (auto _ : state) {
    auto out = kfp::apply_kfp(u, params);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(bm_apply)->Args({1, 512})->Args({2, 128})->Args({3, 32});

void bm_step_rk4(benchmark::State& state) {
  const auto grid = kfp::make_grid(static_cast<int>(state.range(0)), 12.0,
                                   static_cast<int>(state.range(1)));
  const auto params = kfp::make_operator_params(0.5, 0.5);
  const kfp::Field u = gaussian_state(grid);
  const double dt = kfp::stability_dt(params, grid);
  const kfp::SourceSpec source;
  for (auto _ : state) {
    auto next = kfp::step_rk4(u, 0.0, dt, params, source);
    benchmark::DoNotOptimize(next.values.data());
  }
}
BENCHMARK(bm_step_rk4)->Args({1, 512})->Args({2, 128});

void bm_step_backward_euler(benchmark::State& state) {
  const auto grid = kfp::make_grid(static_cast<int>(state.range(0)), 12.0,
                                   static_cast<int>(state.range(1)));
  const auto params = kfp::make_operator_params(0.5, 0.5);
  const kfp::Field u = gaussian_state(grid);
  const kfp::SourceSpec source;
  for (auto _ : state) {
    auto next = kfp::step_backward_euler(u, 0.0, 0.01, params, source);
    benchmark::DoNotOptimize(next.values.data());
  }
}
BENCHMARK(bm_step_backward_euler)->Args({1, 512})->Args({2, 128});

void bm_norm_report(benchmark::State& state) {
  const auto grid = kfp::make_grid(static_cast<int>(state.range(0)), 12.0,
                                   static_cast<int>(state.range(1)));
  const auto params = kfp::make_operator_params(0.5, 0.5);
  const kfp::Field u = gaussian_state(grid);
  for (auto _ : state) {
    auto report = kfp::norm_report(u, 1.0, params, 10);
    benchmark::DoNotOptimize(report.l2);
  }
}
BENCHMARK(bm_norm_report)->Args({1, 512})->Args({2, 128});

}  // namespace

BENCHMARK_MAIN();
