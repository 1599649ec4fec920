#include <benchmark/benchmark.h>

#include "dflow/flow.hpp"
#include "dflow/kernels.hpp"
#include "dflow/models.hpp"
#include "dflow/reference.hpp"

using namespace dflow;

namespace {

ComplexMatrix input(benchmark::State& state) {
  return sample_random_crossover({static_cast<std::size_t>(state.range(0)), 0.5, 7});
}

void BM_CommutatorParallel(benchmark::State& state) {
  const ComplexMatrix m = input(state);
  const ComplexMatrix eta = reference::generator(m, GeneratorScheme::gpc());
  const std::size_t full = static_cast<std::size_t>(m.rows());
  ComplexMatrix out(m.rows(), m.cols());
  for (auto _ : state) {
    kernels::commutator(eta, full, m, full, full, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_CommutatorSerial(benchmark::State& state) {
  const ComplexMatrix m = input(state);
  const ComplexMatrix eta = reference::generator(m, GeneratorScheme::gpc());
  for (auto _ : state) benchmark::DoNotOptimize(reference::commutator(eta, m));
}

void BM_FlowRhsParallel(benchmark::State& state) {
  const ComplexMatrix m = input(state);
  const auto scheme = GeneratorScheme::gpc();
  for (auto _ : state) benchmark::DoNotOptimize(flow_rhs(m, scheme));
}

void BM_FlowRhsSerial(benchmark::State& state) {
  const ComplexMatrix m = input(state);
  const auto scheme = GeneratorScheme::gpc();
  for (auto _ : state) benchmark::DoNotOptimize(reference::flow_rhs(m, scheme));
}

void BM_BandedRhsParallel(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const BandMask band(2, dim);
  const ComplexMatrix m = apply_band_mask(input(state), band);
  const auto scheme = GeneratorScheme::gpc();
  for (auto _ : state) benchmark::DoNotOptimize(flow_rhs(m, scheme, band));
}

void BM_BandedRhsSerial(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const BandMask band(2, dim);
  const ComplexMatrix m = apply_band_mask(input(state), band);
  const auto scheme = GeneratorScheme::gpc();
  for (auto _ : state) benchmark::DoNotOptimize(reference::flow_rhs(m, scheme, band));
}

}  // namespace

BENCHMARK(BM_CommutatorParallel)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CommutatorSerial)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FlowRhsParallel)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FlowRhsSerial)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BandedRhsParallel)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BandedRhsSerial)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
