#include <benchmark/benchmark.h>

#include <rbgd/manifold.hpp>
#include <rbgd/problems.hpp>
#include <rbgd/subproblem.hpp>

namespace rbgd {
namespace {

void BM_PolarFactor(benchmark::State& state) {
  const Index m = state.range(0), p = state.range(1);
  Rng rng(1);
  const Matrix A = gaussian_matrix(m, p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(polar_factor(A));
}
BENCHMARK(BM_PolarFactor)->Args({500, 50})->Args({5000, 10})->Args({5000, 50});

void BM_QuarticSubproblem(benchmark::State& state) {
  const Index m = state.range(0), p = state.range(1);
  Stiefel St(m, p);
  Rng rng(2);
  const ManifoldPoint X = St.random_point(rng);
  const SubproblemSpec spec{St, X, gaussian_matrix(m, p, rng), 1.0, ReferenceFunction::quartic(), {}, true};
  for (auto _ : state) benchmark::DoNotOptimize(solve_quartic_tangent(spec));
}
BENCHMARK(BM_QuarticSubproblem)->Args({500, 50})->Args({5000, 10});

void BM_NepvGradient(benchmark::State& state) {
  const Index m = state.range(0), p = state.range(1);
  const NepvProblem P(m, p, 10.0);
  Stiefel St(m, p);
  Rng rng(3);
  const Matrix X = St.random_point(rng).ambient();
  for (auto _ : state) benchmark::DoNotOptimize(P.gradient(X));
}
BENCHMARK(BM_NepvGradient)->Args({500, 50})->Args({5000, 10});

void BM_NepvValue(benchmark::State& state) {
  const Index m = state.range(0), p = state.range(1);
  const NepvProblem P(m, p, 10.0);
  Stiefel St(m, p);
  Rng rng(4);
  const Matrix X = St.random_point(rng).ambient();
  for (auto _ : state) benchmark::DoNotOptimize(P.value(X));
}
BENCHMARK(BM_NepvValue)->Args({500, 50})->Args({5000, 10});

void BM_SensingGradient(benchmark::State& state) {
  Rng rng(5);
  const SensingProblem P = generate_sensing(500, 10, 100, rng);
  const Matrix X = gaussian_matrix(500, 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(P.gradient(X));
}
BENCHMARK(BM_SensingGradient);

}  // namespace
}  // namespace rbgd

BENCHMARK_MAIN();
