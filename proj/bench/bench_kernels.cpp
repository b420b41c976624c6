#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "regladder/kernels.hpp"

using namespace regladder;

namespace {

Vortices2D make_vortices(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  Vortices2D v;
  for (std::size_t i = 0; i < n; ++i) {
    v.x.push_back(u(rng));
    v.y.push_back(u(rng));
    v.w.push_back(u(rng));
  }
  return v;
}

Charges3D make_charges(std::size_t n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  Charges3D c;
  for (std::size_t i = 0; i < n; ++i) c.push(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
  return c;
}

template <Exec E>
void BM_PatchVelocity2D(benchmark::State& state) {
  const auto v = make_vortices(static_cast<std::size_t>(state.range(0)));
  std::vector<double> u(v.size()), w(v.size());
  for (auto _ : state) {
    patch_velocity_2d(v, 0.01, v.x, v.y, u, w, E);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetComplexityN(state.range(0));
}

template <Exec E>
void BM_LogPairSum2D(benchmark::State& state) {
  const auto v = make_vortices(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(log_pair_sum_2d(v, 0.01, E));
  state.SetComplexityN(state.range(0));
}

template <Exec E>
void BM_CoulombPairSum3D(benchmark::State& state) {
  const auto c = make_charges(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(coulomb_pair_sum_3d(c, 0.25, E));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_PatchVelocity2D<Exec::serial>)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_PatchVelocity2D<Exec::parallel>)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_LogPairSum2D<Exec::serial>)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_LogPairSum2D<Exec::parallel>)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_CoulombPairSum3D<Exec::serial>)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_CoulombPairSum3D<Exec::parallel>)->RangeMultiplier(4)->Range(256, 4096);

BENCHMARK_MAIN();
