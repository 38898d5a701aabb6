#include <benchmark/benchmark.h>

#include "okdroplet/ewald.hpp"
#include "okdroplet/optimize.hpp"
#include "okdroplet/stability.hpp"

#include <random>

using namespace okd;

namespace {

DropletShape noisy(int n, double r, int L) {
  DropletShape s = DropletShape::ball(n, Vec::Zero(), r, L);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int j = 1; j < s.coeffs.size(); ++j)
    if (basis_degree(n, j) != 1) s.coeffs[j] = 0.01 * r * nd(rng) / (1 + basis_degree(n, j));
  return s;
}

}  // namespace

static void EnergyEvaluateTorus2D(benchmark::State& state) {
  const Domain d = Domain::torus(2);
  const int L = int(state.range(0));
  const DropletFunctional fn(d, L);
  const DropletShape s = noisy(2, 0.1, L);
  for (auto _ : state) benchmark::DoNotOptimize(fn.evaluate(s, true));
}
BENCHMARK(EnergyEvaluateTorus2D)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

static void EnergyEvaluateBall3D(benchmark::State& state) {
  const Domain d = Domain::ball(3, 1.0);
  const int L = int(state.range(0));
  const DropletFunctional fn(d, L);
  const DropletShape s = noisy(3, 0.1, L);
  for (auto _ : state) benchmark::DoNotOptimize(fn.evaluate(s, true));
}
BENCHMARK(EnergyEvaluateBall3D)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void EwaldGreen(benchmark::State& state) {
  const int n = int(state.range(0));
  const GreenEvaluator g(Domain::torus(n));
  const Vec x(0.13, -0.21, 0.05), y(-0.02, 0.04, 0.11);
  for (auto _ : state) benchmark::DoNotOptimize(g.G(x, y));
}
BENCHMARK(EwaldGreen)->Arg(2)->Arg(3);

static void BallGreen(benchmark::State& state) {
  const int n = int(state.range(0));
  const GreenEvaluator g(Domain::ball(n, 1.0));
  const Vec x(0.13, -0.21, 0.05), y(-0.02, 0.04, 0.11);
  for (auto _ : state) benchmark::DoNotOptimize(g.G(x, y));
}
BENCHMARK(BallGreen)->Arg(2)->Arg(3);

static void MinimizeTorus2D(benchmark::State& state) {
  const Domain d = Domain::torus(2);
  const ModelParams p = ModelParams::with_radius(d, 5.0, 0.1);
  const DropletShape s = noisy(2, 0.1, 10);
  for (auto _ : state) benchmark::DoNotOptimize(minimize(d, p, s));
}
BENCHMARK(MinimizeTorus2D)->Unit(benchmark::kMillisecond);

static void StabilityAssembly(benchmark::State& state) {
  const int n = int(state.range(0));
  const Domain d = Domain::ball(n, 1.0);
  const ModelParams p = ModelParams::with_radius(d, 1.0, 0.1);
  StabilityResolution res;
  res.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(second_variation_matrix(d, p, 0.1, Vec::Zero(), n == 2 ? 12 : 6, res));
}
BENCHMARK(StabilityAssembly)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void Asymmetry2D(benchmark::State& state) {
  const DropletShape s = noisy(2, 1.0, 6);
  const QuadratureGrid g = sphere_quadrature(2, 20);
  for (auto _ : state) benchmark::DoNotOptimize(frankel_asymmetry(s, g));
}
BENCHMARK(Asymmetry2D)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
