// Serial vs OpenMP kernels, plus one full FMS step, over point counts n.

#include <benchmark/benchmark.h>

#include "rsr/fms.hpp"
#include "rsr/kernels.hpp"
#include "rsr/rng.hpp"

namespace {

constexpr Eigen::Index kDim = 20;

struct Instance {
  rsr::Matrix points;
  rsr::Matrix basis;
  rsr::Vector weights;
};

Instance make_instance(Eigen::Index n) {
  rsr::CounterRng rng(2024);
  Instance in;
  in.points = rsr::gaussian_matrix(rng, kDim, n);
  in.basis = rsr::random_subspace(rng, kDim, 5).basis();
  in.weights = rsr::gaussian_matrix(rng, n, 1).col(0).cwiseAbs();
  return in;
}

template <rsr::Vector (*F)(const rsr::Matrix&, const rsr::Matrix&, const rsr::Vector&)>
void residuals(benchmark::State& state) {
  const Instance in = make_instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(F(in.points, in.basis, rsr::Vector()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <rsr::Matrix (*F)(const rsr::Matrix&, const rsr::Vector&, const rsr::Vector&)>
void scatter(benchmark::State& state) {
  const Instance in = make_instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(F(in.points, in.weights, rsr::Vector()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void fms_step(benchmark::State& state) {
  const Instance in = make_instance(state.range(0));
  const rsr::DataSet data(in.points);
  const rsr::LinearSubspace start = rsr::LinearSubspace::from_orthonormal(in.basis);
  for (auto _ : state) benchmark::DoNotOptimize(rsr::fms_step(data, start, 1e-6));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(residuals<rsr::kernels::serial::residual_norms>)->Name("residual_norms/serial")->Range(1 << 10, 1 << 18);
BENCHMARK(residuals<rsr::kernels::parallel::residual_norms>)->Name("residual_norms/parallel")->Range(1 << 10, 1 << 18);
BENCHMARK(scatter<rsr::kernels::serial::weighted_scatter>)->Name("weighted_scatter/serial")->Range(1 << 10, 1 << 18);
BENCHMARK(scatter<rsr::kernels::parallel::weighted_scatter>)->Name("weighted_scatter/parallel")->Range(1 << 10, 1 << 18);
BENCHMARK(fms_step)->Range(1 << 10, 1 << 16);

BENCHMARK_MAIN();
