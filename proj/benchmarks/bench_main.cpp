#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "treespde/engine.hpp"
#include "treespde/feller.hpp"
#include "treespde/graph.hpp"
#include "treespde/nullspace.hpp"
#include "treespde/rng.hpp"
#include "treespde/spectrum.hpp"

namespace {

using namespace treespde;

void BM_BuildBasis(benchmark::State& state) {
  const MetricTree tree = preset_tree("t-prime");
  const int modes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SpectralBasis basis = build_basis(tree, modes);
    benchmark::DoNotOptimize(basis);
  }
  state.SetItemsProcessed(state.iterations() * modes);
}
BENCHMARK(BM_BuildBasis)->Arg(64)->Arg(256);

// Exact rational kernel plus the support/core split; dominates `analyze`.
void BM_KernelDecomposition(benchmark::State& state) {
  const MetricTree tree = random_tree(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    NullDecomposition d = decompose(tree);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_KernelDecomposition)->Arg(16)->Arg(64)->Arg(256);

// Exhaustive walk over all 2^m noise-free subsets.
void BM_SharpnessEnumeration(benchmark::State& state) {
  const MetricTree tree = random_tree(static_cast<int>(state.range(0)), 11);
  for (auto _ : state) {
    SharpnessCertificate cert = certify_sharpness(tree);
    benchmark::DoNotOptimize(cert);
  }
  state.SetItemsProcessed(state.iterations() *
                          (1LL << (state.range(0) - 1)));
}
BENCHMARK(BM_SharpnessEnumeration)->Arg(8)->Arg(12)->Arg(16);

// Pivoted Cholesky of the one-step mode covariance.
void BM_CovarianceFactor(benchmark::State& state) {
  const MetricTree tree = preset_tree("chain:4");
  const SpectralBasis basis = build_basis(tree, static_cast<int>(state.range(0)));
  const NoiseConfig noise = NoiseConfig::from_noise_free(tree, {0});
  const NoiseSampler sampler(basis, noise);
  for (auto _ : state) {
    NoiseSampler::Factor f = sampler.factor(0.03125);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_CovarianceFactor)->Arg(64)->Arg(256);

// One full trajectory: 16 exponential Euler steps with the nonlinear drift.
void BM_TrajectoryRun(benchmark::State& state) {
  const MetricTree tree = preset_tree("chain:4");
  const SpectralBasis basis = build_basis(tree, static_cast<int>(state.range(0)));
  const NoiseConfig noise = NoiseConfig::from_noise_free(tree, {});
  IntegratorOptions opts;
  const TrajectoryRunner runner(basis, noise, DriftPreset::masked_sine(), opts);
  std::vector<double> initial(basis.size(), 0.1);
  std::uint64_t i = 0;
  for (auto _ : state) {
    Trajectory t = runner.run(initial, derive_stream(99, i++));
    benchmark::DoNotOptimize(t);
  }
  const auto steps = static_cast<std::int64_t>(opts.t_final / opts.tau + 0.5);
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_TrajectoryRun)->Arg(16)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
