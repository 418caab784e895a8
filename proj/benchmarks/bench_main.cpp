#include <benchmark/benchmark.h>

#include "owlab/owlab.hpp"

using namespace owlab;

namespace {

WeightModel power_weight(int m) {
  std::vector<std::vector<double>> c;
  std::vector<double> ex;
  for (int i = 0; i < m; ++i) {
    c.push_back({0.1 + 0.8 * i / std::max(1, m - 1)});
    ex.push_back(i % 2 ? 0.3 : -0.3);
  }
  return WeightModel::diagonal_power(c, ex);
}

void BM_CubeNormClosed(benchmark::State& state) {
  const auto v = power_weight(static_cast<int>(state.range(0)));
  const Vec e = Vec::Ones(v.m());
  for (auto _ : state) benchmark::DoNotOptimize(CubeNorm(v, Box::unit(1), 2.0)(e));
}
BENCHMARK(BM_CubeNormClosed)->Arg(1)->Arg(8);

void BM_CubeNormSampled(benchmark::State& state) {
  // u != p forces the quadrature path
  const auto v = power_weight(static_cast<int>(state.range(0))).with_target_exponent(1.5);
  const Vec e = Vec::Ones(v.m());
  for (auto _ : state) benchmark::DoNotOptimize(CubeNorm(v, Box::unit(1), 2.0)(e));
}
BENCHMARK(BM_CubeNormSampled)->Arg(2)->Arg(8);

void BM_DualOptimizer(benchmark::State& state) {
  const auto v = power_weight(3);
  const CubeNorm rho(v, Box::unit(1), 2.0);
  const Vec es = Vec::Ones(3);
  for (auto _ : state) benchmark::DoNotOptimize(dual_norm(rho, es, {}, true).value);
}
BENCHMARK(BM_DualOptimizer);

void BM_SeqNorm(benchmark::State& state) {
  const auto w = build_window(1, 0, static_cast<int>(state.range(0)), Box::unit(1));
  const auto t = random_sequence(w, 2, 1);
  const auto rho = NormFamily::from_weight(power_weight(2), 2.0);
  const SpaceParams prm{0.5, 2.0, 1.5, state.range(1) ? SpaceKind::TL : SpaceKind::Besov};
  for (auto _ : state) benchmark::DoNotOptimize(seq_norm(t, prm, rho));
}
BENCHMARK(BM_SeqNorm)->Args({6, 0})->Args({6, 1})->Args({10, 0})->Args({10, 1});

void BM_AdApply(benchmark::State& state) {
  const auto w = build_window(1, 0, static_cast<int>(state.range(0)), Box::unit(1));
  const auto b = ADMatrix::canonical({2.5, 2.0, 1.5}, w);
  const auto t = random_sequence(w, 1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ad_apply(b, t).data().data());
}
BENCHMARK(BM_AdApply)->Arg(6)->Arg(9);

void BM_ComposeCheck(benchmark::State& state) {
  const auto w = build_window(1, 0, static_cast<int>(state.range(0)), Box::unit(1));
  for (auto _ : state) benchmark::DoNotOptimize(ad_compose_check({2, 1.5, 1.3}, {6, 7, 6.5}, w).ratio);
}
BENCHMARK(BM_ComposeCheck)->Arg(4)->Arg(6);

void BM_P22Level(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(p22_level(2.0, 0.05, static_cast<int>(state.range(0)), 4096).lhs);
}
BENCHMARK(BM_P22Level)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_LpConvolution(benchmark::State& state) {
  const auto pair = build_lp_pair(5.0 / 3.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(lp_convolution(pair, 0, 1).value.data());
}
BENCHMARK(BM_LpConvolution)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
