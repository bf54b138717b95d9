#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vccgm/dataset.hpp"
#include "vccgm/params.hpp"
#include "vccgm/tape.hpp"

namespace vccgm {

// Label features feeding both the generator embedding and the
// discriminator's projection head: [y, sin 2*pi*y, cos 2*pi*y]. The
// periodic terms give the linear embeddings enough capacity for the
// periodic toy families.
constexpr std::int64_t kLabelFeatureDim = 3;
Tensor label_features(std::span<const double> y);

struct GeneratorConfig {
  std::int64_t noise_dim = 8;
  std::int64_t embed_width = 16;
  std::vector<std::int64_t> hidden{64, 64};
  std::int64_t data_dim = 2;
};

// Shared MLP trunk over x producing feature h; three parallel heads
// consume the same h: a one-layer adversarial head with label projection,
// a two-layer regression head, and a three-layer DRE head whose output
// passes through softplus so density ratios stay positive. The trunk sees
// x only; the conditional label enters through the projection term, which
// keeps adv(x, y1) - adv(x, y2) = <embed(y1) - embed(y2), h(x)> exact.
struct DiscriminatorConfig {
  std::vector<std::int64_t> trunk_hidden{64, 64};  // last entry = feature width
  std::int64_t reg_hidden = 64;
  std::int64_t dre_hidden = 64;
  std::int64_t data_dim = 2;

  std::int64_t feature_width() const { return trunk_hidden.back(); }
};

ParamStore init_generator(const GeneratorConfig& cfg, Rng& rng);
ParamStore init_discriminator(const DiscriminatorConfig& cfg, Rng& rng);

// Binds every array of a store to tape leaves so repeated forwards reuse
// the same nodes and gradients accumulate per parameter.
struct BoundParams {
  Tape* tape = nullptr;
  std::map<std::string, Var> vars;

  Var at(const std::string& name) const;
  // Gradients by parameter name; call after tape->backward().
  std::map<std::string, Tensor> gather_grads() const;
};

BoundParams bind_params(Tape& tape, const ParamStore& store, bool trainable);

// x = G(z, y): concatenates the learned label embedding with z and runs
// the MLP. Deterministic in (params, z, y).
Var generator_forward(Tape& tape, const BoundParams& gen, const GeneratorConfig& cfg,
                      const Tensor& z, std::span<const double> y);

struct DiscOutputs {
  Var adv;    // n x 1, unbounded score (hinge form); sigmoid for vanilla
  Var y_hat;  // n x 1, unconstrained label prediction
  Var dre;    // n x 1, positive density-ratio estimate
  Var h;      // n x feature_width trunk feature
};

DiscOutputs disc_forward(Tape& tape, const BoundParams& disc, const DiscriminatorConfig& cfg,
                         Var x, std::span<const double> y);

// Convenience non-training forwards (scratch tape inside).
Tensor generator_sample(const ParamStore& gen, const GeneratorConfig& cfg, const Tensor& z,
                        std::span<const double> y);

struct EmaState {
  ParamStore shadow;
  double decay = 0.999;
};

// shadow <- decay * shadow + (1 - decay) * live, elementwise.
void ema_update(EmaState& ema, const ParamStore& live);

struct SurrogateConfig {
  std::vector<std::int64_t> hidden{64, 64};
  std::int64_t max_steps = 3000;
  std::int64_t batch = 128;
  double lr = 3e-3;
  double target_mae = 0.02;  // normalized label units
  double val_fraction = 0.1;
  std::uint64_t seed = 1;
};

struct SurrogateResult {
  ParamStore params;
  double val_mae = 0.0;
  bool reached_target = false;
  std::int64_t steps = 0;
};

// Trains an x -> y MLP by MSE until the validation MAE target or the step
// cap. Missing the target is reported, not fatal. Labels are normalized
// with the provided raw range before training; predictions come back in
// normalized units.
SurrogateResult train_surrogate_regressor(const Dataset& ds, double raw_min, double raw_max,
                                          const SurrogateConfig& cfg = {});

Tensor surrogate_predict(const ParamStore& params, const Tensor& x);

}  // namespace vccgm
