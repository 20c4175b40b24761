#include <random>

#include <benchmark/benchmark.h>

#include "dendrofield/grid.hpp"
#include "dendrofield/linop.hpp"
#include "dendrofield/nonlocal.hpp"
#include "dendrofield/stepper.hpp"

using namespace dendrofield;

namespace {

Eigen::MatrixXd random_field(int n_xi, int n_x) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N(0.0, 0.5);
  Eigen::MatrixXd V(n_xi, n_x);
  for (int k = 0; k < V.size(); ++k) V.data()[k] = N(rng);
  return V;
}

NonlocalPlan plan_for(int n_x, int n_xi, const DendriticDelta& delta) {
  const Grid g = build_grid(n_x, n_xi, 24.0 * M_PI, 3.0);
  return build_plan(g, build_weights(g), ExpDecay{3}, delta, 1.0);
}

void BM_NonlocalFFT(benchmark::State& state) {
  const int n_x = static_cast<int>(state.range(0)), n_xi = static_cast<int>(state.range(1));
  const NonlocalPlan plan = plan_for(n_x, n_xi, GaussianDelta{0.05});
  const Eigen::MatrixXd V = random_field(n_xi, n_x);
  Eigen::MatrixXd N(n_xi, n_x);
  for (auto _ : state) {
    eval_N_fft(plan, Sigmoid{}, V, N);
    benchmark::DoNotOptimize(N.data());
  }
  state.SetComplexityN(static_cast<int64_t>(n_x) * n_xi);
}
BENCHMARK(BM_NonlocalFFT)->Args({64, 64})->Args({128, 64})->Args({256, 64})->Args({512, 64})
    ->Args({256, 256})->Args({1024, 256});

void BM_NonlocalCompact(benchmark::State& state) {
  const int n_x = static_cast<int>(state.range(0)), n_xi = static_cast<int>(state.range(1));
  const NonlocalPlan plan = plan_for(n_x, n_xi, TruncatedGaussianDelta{0.05, 1.0});
  const Eigen::MatrixXd V = random_field(n_xi, n_x);
  Eigen::MatrixXd N(n_xi, n_x);
  for (auto _ : state) {
    eval_N_compact(plan, Sigmoid{}, V, N);
    benchmark::DoNotOptimize(N.data());
  }
}
BENCHMARK(BM_NonlocalCompact)->Args({256, 256})->Args({1024, 256})->Args({1024, 1024});

void BM_NonlocalDirect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const NonlocalPlan plan = plan_for(n, n, GaussianDelta{0.5});
  const Eigen::MatrixXd V = random_field(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(eval_N_direct(plan, Sigmoid{}, V));
}
BENCHMARK(BM_NonlocalDirect)->Arg(8)->Arg(16)->Arg(32);

void BM_TridiagonalSolve(benchmark::State& state) {
  const int n_x = static_cast<int>(state.range(0)), n_xi = static_cast<int>(state.range(1));
  const Grid g = build_grid(n_x, n_xi, 24.0 * M_PI, 3.0);
  const auto F = factorize(build_A(build_laplacian(g), 1.0, 0.4, 0.05));
  const Eigen::MatrixXd B0 = random_field(n_xi, n_x);
  Eigen::MatrixXd B = B0;
  for (auto _ : state) {
    B = B0;
    solve_in_place(F, B);
    benchmark::DoNotOptimize(B.data());
  }
}
BENCHMARK(BM_TridiagonalSolve)->Args({256, 256})->Args({1024, 256})->Args({1024, 1024});

void BM_Step(benchmark::State& state) {
  SimulationConfig c;
  c.grid = GridSpec{static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                    24.0 * M_PI, 3.0};
  c.model.params.eps = 0.05;
  c.model.delta = GaussianDelta{0.05};
  const Grid g = build_grid(c.grid.n_x, c.grid.n_xi, c.grid.L_x, c.grid.L_xi);
  const NonlocalPlan plan = build_plan(g, build_weights(g), c.model.kernel, c.model.delta, 1.0);
  const auto F = factorize(build_A(build_laplacian(g), 1.0, 0.4, c.tau));
  const Eigen::MatrixXd G = Eigen::MatrixXd::Zero(g.n_xi(), g.n_x());
  FieldState V{eval_initial(c.initial, g), 0.0};
  for (auto _ : state) {
    FieldState next = imex_step(F, plan, c.model.rate, G, V, c.tau);
    benchmark::DoNotOptimize(next.values.data());
  }
}
BENCHMARK(BM_Step)->Args({256, 256})->Args({512, 256})->Args({1024, 256});

}  // namespace

BENCHMARK_MAIN();
