// Serial reference kernels against the OpenMP ones. Thread count for the
// parallel variants follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <omp.h>

#include <numbers>
#include <random>

#include "qgrape/grape.hpp"

namespace {

using namespace qgrape;

struct Case {
  EstimationProblem problem;
  ControlGrid grid;
  Trajectory traj;
};

Case make_case(std::size_t steps) {
  const double dt = 0.05;
  auto p = qubit_frequency_problem(1.0, xyz_controls(), Dephasing{std::numbers::pi / 2, 0, 0.1},
                                   DensityState::plus(), dt * static_cast<double>(steps));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(steps), 3);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  ControlGrid grid(a, dt);
  Trajectory traj = propagate(p, grid);
  return {std::move(p), std::move(grid), std::move(traj)};
}

void BM_GradientReference(benchmark::State& state) {
  const Case c = make_case(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::gradient(c.traj, c.problem, Objective::quantum()));
  }
  state.SetComplexityN(state.range(0));
}

void BM_GradientAdjoint(benchmark::State& state) {
  const Case c = make_case(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient(c.traj, c.problem, Objective::quantum()));
  }
  state.counters["threads"] = omp_get_max_threads();
  state.SetComplexityN(state.range(0));
}

void BM_GradientAdjointSerial(benchmark::State& state) {
  const Case c = make_case(static_cast<std::size_t>(state.range(0)));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient(c.traj, c.problem, Objective::quantum()));
  }
  omp_set_num_threads(saved);
  state.SetComplexityN(state.range(0));
}

void BM_FiniteDifferenceReference(benchmark::State& state) {
  const Case c = make_case(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::finite_difference_gradient(c.problem, c.grid, Objective::quantum(), 1e-5));
  }
}

void BM_FiniteDifferenceParallel(benchmark::State& state) {
  const Case c = make_case(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(finite_difference_gradient(c.problem, c.grid, Objective::quantum(), 1e-5));
  }
  state.counters["threads"] = omp_get_max_threads();
}

void BM_Propagate(benchmark::State& state) {
  const Case c = make_case(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(c.problem, c.grid));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_GradientReference)->RangeMultiplier(2)->Range(25, 200)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_GradientAdjoint)->RangeMultiplier(2)->Range(25, 800)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_GradientAdjointSerial)->RangeMultiplier(2)->Range(25, 800)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_FiniteDifferenceReference)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FiniteDifferenceParallel)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Propagate)->RangeMultiplier(4)->Range(25, 1600)->Unit(benchmark::kMicrosecond)->Complexity();

BENCHMARK_MAIN();
