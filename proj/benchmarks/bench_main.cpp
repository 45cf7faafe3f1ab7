#include <benchmark/benchmark.h>

#include "blockrelax/instance_gen.hpp"
#include "blockrelax/selector_oracle.hpp"
#include "blockrelax/wl1_solver.hpp"

namespace br = blockrelax;

namespace {

br::RelaxedInstance bench_instance(int n, int theta, int r) {
  br::GenConfig cfg;
  cfg.m = cfg.n = n;
  cfg.theta = theta;
  cfg.r = r;
  cfg.s = n / 4;
  cfg.guess_density = 0.25;
  cfg.master_seed = 42;
  return br::build_instance(cfg);
}

void BM_BuildInstance(benchmark::State& state) {
  br::GenConfig cfg;
  cfg.m = cfg.n = static_cast<int>(state.range(0));
  cfg.theta = 4;
  cfg.r = 8;
  cfg.s = cfg.n / 4;
  cfg.guess_density = 0.25;
  for (auto _ : state) {
    benchmark::DoNotOptimize(br::build_instance(cfg));
    ++cfg.master_seed;
  }
}
BENCHMARK(BM_BuildInstance)->Arg(16)->Arg(64);

void BM_SolveWeightedBp(benchmark::State& state) {
  const auto inst = bench_instance(static_cast<int>(state.range(0)), 4, static_cast<int>(state.range(1)));
  const br::Matrix b = br::effective_matrix(inst.A, inst.X);
  const br::Vector w = br::solver_weights(inst.X, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(br::solve_weighted_bp(b, w, inst.y));
}
BENCHMARK(BM_SolveWeightedBp)->Args({16, 4})->Args({32, 8})->Args({64, 8});

void BM_KktCertificate(benchmark::State& state) {
  const auto inst = bench_instance(static_cast<int>(state.range(0)), 4, 8);
  const br::Matrix b = br::effective_matrix(inst.A, inst.X);
  const br::Vector w = br::solver_weights(inst.X, 0.5);
  const auto t = inst.X.planted_global();
  const br::Vector signs = br::Vector::Ones(static_cast<Eigen::Index>(t.size()));
  for (auto _ : state) benchmark::DoNotOptimize(br::kkt_certificate(b, w, t, signs));
}
BENCHMARK(BM_KktCertificate)->Arg(16)->Arg(64);

void BM_EnumerateSelectors(benchmark::State& state) {
  const auto inst = bench_instance(16, 4, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(br::enumerate_selectors(inst, 0.5, 1e-8));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0) * state.range(0));
}
BENCHMARK(BM_EnumerateSelectors)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
