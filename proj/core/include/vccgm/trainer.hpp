#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vccgm/dataset.hpp"
#include "vccgm/label_index.hpp"
#include "vccgm/losses.hpp"
#include "vccgm/models.hpp"
#include "vccgm/optimizer.hpp"
#include "vccgm/vicinity.hpp"

namespace vccgm {

enum class VicinityMode { hard, soft, soft_av, hybrid_av };

VicinityMode parse_vicinity_mode(const std::string& name);
std::string vicinity_mode_name(VicinityMode mode);
bool is_adaptive(VicinityMode mode);

struct TrainConfig {
  std::int64_t steps = 5000;        // generator iterations
  std::int64_t batch_size = 64;     // conditional targets per update
  double learning_rate = 1e-3;
  double momentum = 0.5;
  std::string optimizer = "momentum";
  std::int64_t num_d_steps = 2;     // discriminator updates per generator update
  VicinityMode vicinity_mode = VicinityMode::hybrid_av;
  std::int64_t n_av = 30;
  double sigma = -1.0;              // < 0: rule of thumb
  double kappa = -1.0;              // < 0: rule of thumb (fixed-vicinity modes)
  double weight_threshold = kDefaultWeightThreshold;
  int decay_exponent = 2;           // nu = 1 / kappa^decay_exponent
  AdvForm loss_form = AdvForm::hinge;
  LossWeights weights;
  double ema_decay = 0.999;
  std::int64_t ema_start = 1000;    // generator steps before EMA blending begins
  std::uint64_t seed = 1;
  std::int64_t checkpoint_every = 1000;
  std::int64_t reals_per_target = 2;   // 0: use the full weighted support
  std::int64_t fakes_per_target = 1;
  bool fake_pool_weighting = false;    // weight the whole fake pool per target
  bool use_surrogate_for_fake_reg = false;
  bool spectral_clip = false;
  double spectral_clip_limit = 3.0;
  std::int64_t noise_dim = 8;
  std::vector<std::int64_t> gen_hidden{64, 64};
  std::vector<std::int64_t> disc_hidden{64, 64};
  std::int64_t embed_width = 16;
  double raw_min = std::numeric_limits<double>::quiet_NaN();  // NaN: dataset min
  double raw_max = std::numeric_limits<double>::quiet_NaN();  // NaN: dataset max

  void validate() const;
  static TrainConfig from_json(const std::string& json_text);
  std::string to_json() const;
};

// Targets are training labels drawn uniformly over samples, perturbed by
// Gaussian noise and clamped into [0, 1].
std::vector<double> sample_targets(const LabelIndex& index, std::int64_t count, double sigma,
                                   Rng& rng);

struct StepLoss {
  double d_adv = 0.0, d_reg = 0.0, d_dre = 0.0;
  double g_adv = 0.0, g_reg = 0.0, g_f = 0.0;
  double gamma = 0.0, mean_kappa = 0.0;
};

// One conditional target within a discriminator batch.
struct DiscTarget {
  double y_c = 0.0;
  double kappa = 0.0;                     // radius used for this target
  std::vector<std::int64_t> real_rows;    // dataset rows
  std::vector<double> real_weights;       // aligned with real_rows, sum 1
  std::vector<double> fake_weights;       // own fakes, or dense over the pool
};

struct DiscBatch {
  std::vector<DiscTarget> targets;
  std::vector<double> fake_row_labels;  // conditional label per generated row
  Tensor z;                             // fake noise, rows match fake_row_labels
  bool pool_fakes = false;
};

struct GenBatch {
  std::vector<double> targets;
  Tensor z;
};

struct TrainResult {
  std::int64_t completed_steps = 0;
  bool aborted = false;
  std::string abort_reason;
  std::int64_t log_clamp_events = 0;
};

// Orchestrates alternating D/G updates with vicinal weighting, EMA
// maintenance and checkpointing. Generator and discriminator parameters
// live in separate stores; disc_step touches only the discriminator and
// gen_step only the generator (plus its EMA shadow).
class Trainer {
 public:
  Trainer(TrainConfig cfg, const Dataset& ds);

  DiscBatch make_disc_batch();
  GenBatch make_gen_batch();
  StepLoss disc_step(const DiscBatch& batch);
  StepLoss gen_step(const GenBatch& batch);
  StepLoss disc_step() { return disc_step(make_disc_batch()); }
  StepLoss gen_step() { return gen_step(make_gen_batch()); }

  // Full run: training_log.csv, checkpoint_<step>.bin at the configured
  // cadence, final_ema.bin on completion. A NumericalError mid-run aborts
  // with the last cadence checkpoint retained.
  TrainResult train(const std::filesystem::path& out_dir);

  const TrainConfig& config() const { return cfg_; }
  const LabelIndex& index() const { return index_; }
  const ParamStore& generator() const { return gen_; }
  const ParamStore& discriminator() const { return disc_; }
  const EmaState& ema() const { return ema_; }
  const GeneratorConfig& gen_config() const { return gen_cfg_; }
  const DiscriminatorConfig& disc_config() const { return disc_cfg_; }
  double sigma() const { return sigma_; }
  double kappa_base() const { return kappa_base_; }
  std::int64_t gen_steps_done() const { return gen_steps_done_; }
  std::int64_t disc_steps_done() const { return disc_steps_done_; }
  std::int64_t log_clamp_events() const { return clamp_events_; }
  Rng& rng() { return rng_; }

 private:
  struct TargetVicinity {
    double kappa = 0.0;
    WeightVector weights;  // indices into the sorted label view
  };
  TargetVicinity build_target_vicinity(double y_c) const;

  TrainConfig cfg_;
  const Dataset* data_;
  LabelIndex index_;
  double sigma_ = 0.0;
  double kappa_base_ = 0.0;
  std::vector<double> norm_labels_;     // per dataset row, snapped
  std::vector<std::int64_t> sort_perm_; // dataset rows sorted by label
  std::vector<double> sorted_labels_;
  GeneratorConfig gen_cfg_;
  DiscriminatorConfig disc_cfg_;
  ParamStore gen_, disc_;
  EmaState ema_;
  Optimizer opt_gen_, opt_disc_;
  ParamStore power_;  // spectral clip state
  std::optional<ParamStore> surrogate_;
  Rng rng_;
  std::int64_t gen_steps_done_ = 0;
  std::int64_t disc_steps_done_ = 0;
  std::int64_t clamp_events_ = 0;
};

// Checkpoint metadata (JSON in the checkpoint header).
struct CheckpointMeta {
  std::string kind;  // "train" or "ema_generator"
  std::int64_t step = 0;
  GeneratorConfig gen;
  DiscriminatorConfig disc;
  double raw_min = 0.0;
  double raw_max = 1.0;
};

std::string make_checkpoint_meta(const CheckpointMeta& meta);
CheckpointMeta parse_checkpoint_meta(const std::string& json_text);

}  // namespace vccgm
