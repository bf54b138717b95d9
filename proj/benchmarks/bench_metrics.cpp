#include <benchmark/benchmark.h>

#include "vccgm/evalsuite.hpp"

namespace {

using namespace vccgm;

Tensor random_psd(std::int64_t d, Rng& rng) {
  Tensor a = Tensor::randn(d, d, rng);
  Tensor s = Tensor::zeros(d, d);
  for (std::int64_t i = 0; i < d; ++i)
    for (std::int64_t j = 0; j < d; ++j) {
      for (std::int64_t k = 0; k < d; ++k) s.at(i, j) += a.at(k, i) * a.at(k, j);
      if (i == j) s.at(i, j) += 0.1;
    }
  return s;
}

void FrechetGaussian(benchmark::State& state) {
  const std::int64_t d = state.range(0);
  Rng rng(11);
  Tensor mu1 = Tensor::randn(1, d, rng);
  Tensor mu2 = Tensor::randn(1, d, rng);
  Tensor s1 = random_psd(d, rng);
  Tensor s2 = random_psd(d, rng);
  for (auto _ : state) {
    double fd = frechet_gaussian(mu1, s1, mu2, s2);
    benchmark::DoNotOptimize(fd);
  }
}
BENCHMARK(FrechetGaussian)->Arg(2)->Arg(3)->Arg(8);

void BatchMoments(benchmark::State& state) {
  Rng rng(12);
  Tensor x = Tensor::randn(state.range(0), 3, rng);
  for (auto _ : state) {
    Tensor mu, cov;
    batch_moments(x, mu, cov);
    benchmark::DoNotOptimize(cov.data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BatchMoments)->RangeMultiplier(4)->Range(256, 16384);

void Diversity(benchmark::State& state) {
  OracleSampler oracle(ToyFamily{});
  EvalConfig cfg;
  cfg.centers = {0.5};
  cfg.n_fake_per_center = state.range(0);
  for (auto _ : state) {
    auto v = diversity(oracle, cfg);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(Diversity)->Arg(200)->Arg(1000);

}  // namespace
