#include <benchmark/benchmark.h>

#include "vccgm/vicinity.hpp"

namespace {

using namespace vccgm;

LabelIndex make_index(std::int64_t m) {
  Rng rng(7);
  std::vector<double> labels;
  for (std::int64_t i = 0; i < m; ++i) {
    double y = static_cast<double>(i) / static_cast<double>(m - 1);
    std::int64_t count = 1 + static_cast<std::int64_t>(rng.uniform_index(48));
    for (std::int64_t k = 0; k < count; ++k) labels.push_back(y);
  }
  return build_index(labels, 0.0, 1.0);
}

void BuildAdaptive(benchmark::State& state) {
  LabelIndex idx = make_index(state.range(0));
  Rng rng(3);
  std::int64_t n_av = idx.total() / 20 + 1;
  for (auto _ : state) {
    VicinityParams p = build_adaptive(idx, rng.uniform(), n_av);
    benchmark::DoNotOptimize(p);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BuildAdaptive)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void SoftWeightsSorted(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> labels(static_cast<std::size_t>(state.range(0)));
  for (auto& y : labels) y = rng.uniform();
  std::sort(labels.begin(), labels.end());
  for (auto _ : state) {
    WeightVector w = soft_weights(labels, 0.5, 2500.0, 1e-3, true);
    benchmark::DoNotOptimize(w);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(SoftWeightsSorted)->RangeMultiplier(4)->Range(1024, 65536)->Complexity();

void HybridWeights(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> labels(static_cast<std::size_t>(state.range(0)));
  for (auto& y : labels) y = rng.uniform();
  std::sort(labels.begin(), labels.end());
  VicinityParams p;
  p.kappa = 0.02;
  p.nu = 2500.0;
  for (auto _ : state) {
    WeightVector w = hybrid_weights(labels, 0.5, p, 1e-3, true);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(HybridWeights)->Arg(65536);

}  // namespace
