// Serial reference vs OpenMP kernels, and the orbit sampler over loops.

#include "snake/kernels.hpp"
#include "snake/orbit.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace snake;

namespace {

Mat unit_columns(int d, int n) {
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  Mat m(d, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) m(i, j) = g(rng);
    m.col(j).normalize();
  }
  return m;
}

Mat lorentz(int d) {
  Vec v = Vec::LinSpaced(d, 0.1, 0.4);
  return boost(v, 1.0).matrix();
}

template <Mat (*Act)(const Mat&, const Mat&)>
void BM_act(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mat pts = unit_columns(3, n);
  const Mat g = lorentz(3);
  for (auto _ : state) benchmark::DoNotOptimize(Act(g, pts));
  state.SetItemsProcessed(state.iterations() * n);
}

template <kernels::Moments (*Mom)(const Mat&, const Vec&)>
void BM_moments(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mat pts = unit_columns(3, n);
  const Vec w = Vec::Constant(n, 1.0 / n);
  for (auto _ : state) benchmark::DoNotOptimize(Mom(pts, w));
  state.SetItemsProcessed(state.iterations() * n);
}

Configuration hexagon() {
  std::vector<Vec> v;
  for (int i = 0; i < 6; ++i) {
    Vec x(3);
    x << std::cos(i * 1.0472), std::sin(i * 1.0472), 0.1 * i - 0.25;
    v.push_back(x.normalized());
  }
  return Configuration::piecewise_constant(Partition::uniform(6.0, 6), v);
}

template <bool Parallel>
void BM_orbit_sample(benchmark::State& state) {
  const Configuration z = hexagon();
  const auto loops = small_loops(z, 0.05, static_cast<int>(state.range(0)), 1);
  LiftOptions o;
  o.step = 1e-2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? orbit_sample(z, loops, o) : serial::orbit_sample(z, loops, o));
  }
}

}  // namespace

BENCHMARK(BM_act<kernels::serial::act>)->Name("act/serial")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_act<kernels::parallel::act>)->Name("act/parallel")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_moments<kernels::serial::moments>)->Name("moments/serial")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_moments<kernels::parallel::moments>)->Name("moments/parallel")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_orbit_sample<false>)->Name("orbit_sample/serial")->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_orbit_sample<true>)->Name("orbit_sample/parallel")->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
