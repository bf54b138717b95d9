#include <benchmark/benchmark.h>

#include "vccgm/tape.hpp"

namespace {

using namespace vccgm;

void Matmul(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  Rng rng(1);
  Tensor a = Tensor::randn(n, n, rng);
  Tensor b = Tensor::randn(n, n, rng);
  for (auto _ : state) {
    Tape t;
    Var c = t.matmul(t.leaf(a), t.leaf(b));
    benchmark::DoNotOptimize(t.value(c).data.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(Matmul)->RangeMultiplier(2)->Range(16, 256);

void MlpForwardBackward(benchmark::State& state) {
  const std::int64_t batch = state.range(0);
  Rng rng(2);
  Tensor x = Tensor::randn(batch, 8, rng);
  Tensor w1 = Tensor::randn(8, 64, rng, 0.3);
  Tensor b1 = Tensor::zeros(1, 64);
  Tensor w2 = Tensor::randn(64, 64, rng, 0.3);
  Tensor b2 = Tensor::zeros(1, 64);
  Tensor w3 = Tensor::randn(64, 1, rng, 0.3);
  for (auto _ : state) {
    Tape t;
    Var w1v = t.leaf(w1, true), w2v = t.leaf(w2, true), w3v = t.leaf(w3, true);
    Var h = t.leaky_relu(t.add_bias(t.matmul(t.leaf(x), w1v), t.leaf(b1)), 0.2);
    h = t.leaky_relu(t.add_bias(t.matmul(h, w2v), t.leaf(b2)), 0.2);
    Var loss = t.mean(t.square(t.matmul(h, w3v)));
    t.backward(loss);
    benchmark::DoNotOptimize(t.grad(w1v).data.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(MlpForwardBackward)->RangeMultiplier(2)->Range(16, 512);

}  // namespace
