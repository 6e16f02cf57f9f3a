#include <benchmark/benchmark.h>

#include <vector>

#include "qdlab/ea_spin_glass.hpp"
#include "qdlab/emch_radin.hpp"
#include "qdlab/sparse_jacobi.hpp"
#include "qdlab/spectral_dynamics.hpp"

namespace {

using namespace qdlab;

std::vector<double> grid(double hi, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = hi * i / (n - 1);
  return t;
}

void BM_ClusterBoundEnumeration(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cluster_lower_bound(d, CouplingDistribution::bernoulli()));
}
BENCHMARK(BM_ClusterBoundEnumeration)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveGroundState(benchmark::State& state) {
  const Lattice lat(2, static_cast<int>(state.range(0)), Boundary::kPeriodic);
  const auto inst = EAInstance::sample(lat, CouplingDistribution::gaussian(), 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(ground_state_exhaustive(inst));
}
BENCHMARK(BM_ExhaustiveGroundState)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_QuantumGroundEnergyLanczos(benchmark::State& state) {
  auto inst = EAInstance::sample(Lattice(1, static_cast<int>(state.range(0)), Boundary::kPeriodic),
                                 CouplingDistribution::uniform(), 2, 0);
  inst.anisotropy = {0.5, 0.5, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(quantum_ground_energy(inst, QuantumSolver::kLanczos));
}
BENCHMARK(BM_QuantumGroundEnergyLanczos)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_TruncatedSpectrum(benchmark::State& state) {
  SparseModelParams p;
  p.v = 0.9;
  const auto pot = build_potential(p);
  for (auto _ : state) benchmark::DoNotOptimize(truncated_spectrum(pot, state.range(0), 0.0));
}
BENCHMARK(BM_TruncatedSpectrum)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_CantorCesaro(benchmark::State& state) {
  const auto mu = cantor_measure(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cesaro_average(mu, 1000.0));
}
BENCHMARK(BM_CantorCesaro)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MonteCarloTrace(benchmark::State& state) {
  const auto times = grid(10.0, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_average_f(CouplingDistribution::uniform(), 4, 1.0, 1.0, times,
                                          static_cast<std::uint64_t>(state.range(0)), 1));
  }
}
BENCHMARK(BM_MonteCarloTrace)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_ExactMagnetization(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a + 1 < n; ++a) k(a, a + 1) = k(a + 1, a) = 0.3 + 0.1 * a;
  const auto times = grid(10.0, 50);
  for (auto _ : state) benchmark::DoNotOptimize(exact_magnetization_trace(k, 1.0, times, n / 2));
}
BENCHMARK(BM_ExactMagnetization)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_FiniteVolumeAverage(benchmark::State& state) {
  DisorderedEmchModel model;
  model.distribution = CouplingDistribution::gaussian();
  model.volume_half_width = static_cast<int>(state.range(0));
  const auto times = grid(3.0, 31);
  for (auto _ : state) benchmark::DoNotOptimize(finite_volume_average_f(model, times, 1));
}
BENCHMARK(BM_FiniteVolumeAverage)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
