#include "vccgm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "vccgm/threads.hpp"

namespace vccgm {

using nlohmann::json;

VicinityMode parse_vicinity_mode(const std::string& name) {
  if (name == "hard") return VicinityMode::hard;
  if (name == "soft") return VicinityMode::soft;
  if (name == "soft_av") return VicinityMode::soft_av;
  if (name == "hybrid_av") return VicinityMode::hybrid_av;
  throw InvalidSpec("unknown vicinity mode '" + name + "'");
}

std::string vicinity_mode_name(VicinityMode mode) {
  switch (mode) {
    case VicinityMode::hard: return "hard";
    case VicinityMode::soft: return "soft";
    case VicinityMode::soft_av: return "soft_av";
    case VicinityMode::hybrid_av: return "hybrid_av";
  }
  return "hybrid_av";
}

bool is_adaptive(VicinityMode mode) {
  return mode == VicinityMode::soft_av || mode == VicinityMode::hybrid_av;
}

void TrainConfig::validate() const {
  if (steps < 1) throw InvalidSpec("config: steps must be >= 1");
  if (batch_size < 1) throw InvalidSpec("config: batch_size must be >= 1");
  if (num_d_steps < 1) throw InvalidSpec("config: num_D_steps must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidSpec("config: learning_rate must be positive");
  if (is_adaptive(vicinity_mode) && n_av < 1)
    throw InvalidSpec("config: adaptive vicinity modes require n_av >= 1");
  if (decay_exponent != 1 && decay_exponent != 2)
    throw InvalidSpec("config: decay_exponent must be 1 or 2");
  if (!(weight_threshold >= 0.0 && weight_threshold < 1.0))
    throw InvalidSpec("config: weight_threshold must lie in [0, 1)");
  if (!(ema_decay >= 0.0 && ema_decay <= 1.0))
    throw InvalidSpec("config: ema_decay must lie in [0, 1]");
  if (reals_per_target < 0) throw InvalidSpec("config: reals_per_target must be >= 0");
  if (fakes_per_target < 1) throw InvalidSpec("config: fakes_per_target must be >= 1");
  if (checkpoint_every < 1) throw InvalidSpec("config: checkpoint_every must be >= 1");
  if (weights.lambda_reg_d < 0.0 || weights.lambda_dre_d < 0.0 || weights.lambda_reg_g < 0.0 ||
      weights.lambda_f_g < 0.0 || weights.lambda_dre < 0.0)
    throw InvalidSpec("config: loss weights must be >= 0");
  if (spectral_clip && !(spectral_clip_limit > 0.0))
    throw InvalidSpec("config: spectral_clip_limit must be positive");
  if (weights.gamma_mode == GammaMode::fixed && weights.gamma_fixed < 0.0)
    throw InvalidSpec("config: gamma_fixed must be >= 0");
}

std::vector<double> sample_targets(const LabelIndex& index, std::int64_t count, double sigma,
                                   Rng& rng) {
  if (!(sigma >= 0.0)) throw InvalidSpec("sample_targets: sigma must be >= 0");
  std::vector<double> targets(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    double y = index.pick_sample_label(rng);
    if (sigma > 0.0) y += sigma * rng.normal();
    targets[static_cast<std::size_t>(i)] = std::clamp(y, 0.0, 1.0);
  }
  return targets;
}

Trainer::Trainer(TrainConfig cfg, const Dataset& ds)
    : cfg_(std::move(cfg)), data_(&ds), opt_gen_(Optimizer::parse(cfg_.optimizer), cfg_.learning_rate, cfg_.momentum),
      opt_disc_(Optimizer::parse(cfg_.optimizer), cfg_.learning_rate, cfg_.momentum),
      rng_(cfg_.seed) {
  cfg_.validate();
  if (ds.n() == 0) throw EmptyDataset("trainer: empty dataset");

  double rmin = cfg_.raw_min, rmax = cfg_.raw_max;
  if (std::isnan(rmin)) rmin = *std::min_element(ds.labels.begin(), ds.labels.end());
  if (std::isnan(rmax)) rmax = *std::max_element(ds.labels.begin(), ds.labels.end());
  if (!(rmin < rmax))
    throw InsufficientLabels("trainer: dataset needs a nondegenerate label range");
  cfg_.raw_min = rmin;
  cfg_.raw_max = rmax;

  index_ = build_index(ds.labels, rmin, rmax);
  if (is_adaptive(cfg_.vicinity_mode) && cfg_.n_av > index_.total())
    throw InsufficientSamples("trainer: n_av exceeds dataset size");

  GlobalHyperparams hp;
  if (cfg_.sigma < 0.0 || cfg_.kappa < 0.0) hp = rule_of_thumb(index_);
  sigma_ = cfg_.sigma < 0.0 ? hp.sigma : cfg_.sigma;
  kappa_base_ = cfg_.kappa < 0.0 ? hp.kappa_base : cfg_.kappa;
  if (!(sigma_ > 0.0)) sigma_ = 1e-6;  // sigma -> 0 limit stays well-defined

  norm_labels_.resize(static_cast<std::size_t>(ds.n()));
  for (std::int64_t i = 0; i < ds.n(); ++i)
    norm_labels_[static_cast<std::size_t>(i)] =
        snap_unit(index_.normalize(ds.labels[static_cast<std::size_t>(i)]));
  sort_perm_.resize(static_cast<std::size_t>(ds.n()));
  std::iota(sort_perm_.begin(), sort_perm_.end(), 0);
  std::stable_sort(sort_perm_.begin(), sort_perm_.end(), [&](std::int64_t a, std::int64_t b) {
    return norm_labels_[static_cast<std::size_t>(a)] < norm_labels_[static_cast<std::size_t>(b)];
  });
  sorted_labels_.resize(sort_perm_.size());
  for (std::size_t i = 0; i < sort_perm_.size(); ++i)
    sorted_labels_[i] = norm_labels_[static_cast<std::size_t>(sort_perm_[i])];

  gen_cfg_ = GeneratorConfig{cfg_.noise_dim, cfg_.embed_width, cfg_.gen_hidden,
                             ds.d};
  disc_cfg_ = DiscriminatorConfig{cfg_.disc_hidden, cfg_.disc_hidden.back(),
                                  cfg_.disc_hidden.back(), ds.d};
  gen_ = init_generator(gen_cfg_, rng_);
  disc_ = init_discriminator(disc_cfg_, rng_);
  ema_ = EmaState{gen_, cfg_.ema_decay};

  if (cfg_.use_surrogate_for_fake_reg) {
    SurrogateConfig scfg;
    scfg.seed = Rng::splitmix64(cfg_.seed ^ 0x5a6b7c8d9eafULL);
    surrogate_ = train_surrogate_regressor(ds, rmin, rmax, scfg).params;
  }
}

Trainer::TargetVicinity Trainer::build_target_vicinity(double y_c) const {
  try {
    TargetVicinity tv;
    switch (cfg_.vicinity_mode) {
      case VicinityMode::hard:
        tv.kappa = kappa_base_;
        tv.weights = hard_weights(sorted_labels_, y_c, kappa_base_, true);
        break;
      case VicinityMode::soft: {
        tv.kappa = kappa_base_;
        double nu = cfg_.decay_exponent == 2 ? 1.0 / (kappa_base_ * kappa_base_) : 1.0 / kappa_base_;
        tv.weights = soft_weights(sorted_labels_, y_c, nu, cfg_.weight_threshold, true);
        break;
      }
      case VicinityMode::soft_av: {
        VicinityParams p = build_adaptive(index_, y_c, cfg_.n_av, cfg_.decay_exponent);
        tv.kappa = p.kappa;
        tv.weights = soft_weights(sorted_labels_, y_c, p.nu, cfg_.weight_threshold, true);
        break;
      }
      case VicinityMode::hybrid_av: {
        VicinityParams p = build_adaptive(index_, y_c, cfg_.n_av, cfg_.decay_exponent);
        tv.kappa = p.kappa;
        tv.weights = hybrid_weights(sorted_labels_, y_c, p, cfg_.weight_threshold, true);
        break;
      }
    }
    return tv;
  } catch (const EmptyVicinity& e) {
    throw EmptyVicinity("target y_c=" + std::to_string(y_c) + ": " + e.what());
  }
}

DiscBatch Trainer::make_disc_batch() {
  DiscBatch batch;
  batch.pool_fakes = cfg_.fake_pool_weighting;
  std::vector<double> targets = sample_targets(index_, cfg_.batch_size, sigma_, rng_);

  std::vector<TargetVicinity> vicinities(targets.size());
  parallel_for(static_cast<std::int64_t>(targets.size()), [&](std::int64_t i) {
    vicinities[static_cast<std::size_t>(i)] =
        build_target_vicinity(targets[static_cast<std::size_t>(i)]);
  });

  batch.targets.resize(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    DiscTarget& t = batch.targets[j];
    t.y_c = targets[j];
    t.kappa = vicinities[j].kappa;
    const WeightVector& w = vicinities[j].weights;
    if (cfg_.reals_per_target == 0) {
      // Full weighted support.
      t.real_rows.reserve(w.size());
      for (std::size_t k = 0; k < w.size(); ++k)
        t.real_rows.push_back(sort_perm_[static_cast<std::size_t>(w.indices[k])]);
      t.real_weights = w.weights;
    } else {
      // Monte-Carlo realization: draw with replacement proportionally to
      // the vicinal weights, uniform 1/k on the draws.
      std::vector<double> cum(w.size());
      std::partial_sum(w.weights.begin(), w.weights.end(), cum.begin());
      for (std::int64_t k = 0; k < cfg_.reals_per_target; ++k) {
        double u = rng_.uniform() * cum.back();
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::size_t pos = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()),
                                                w.size() - 1);
        t.real_rows.push_back(sort_perm_[static_cast<std::size_t>(w.indices[pos])]);
      }
      t.real_weights.assign(t.real_rows.size(),
                            1.0 / static_cast<double>(t.real_rows.size()));
    }
  }

  // Fake rows: fakes_per_target per target at the target's own label.
  for (std::size_t j = 0; j < targets.size(); ++j)
    for (std::int64_t k = 0; k < cfg_.fakes_per_target; ++k)
      batch.fake_row_labels.push_back(targets[j]);
  batch.z = Tensor::randn(static_cast<std::int64_t>(batch.fake_row_labels.size()),
                          cfg_.noise_dim, rng_);

  if (batch.pool_fakes) {
    // Full vicinal weighting of the fake pool per target.
    for (std::size_t j = 0; j < targets.size(); ++j) {
      DiscTarget& t = batch.targets[j];
      t.fake_weights.assign(batch.fake_row_labels.size(), 0.0);
      WeightVector w;
      switch (cfg_.vicinity_mode) {
        case VicinityMode::hard:
          w = hard_weights(batch.fake_row_labels, t.y_c, t.kappa);
          break;
        case VicinityMode::soft:
        case VicinityMode::soft_av: {
          double nu = cfg_.decay_exponent == 2 ? 1.0 / (t.kappa * t.kappa) : 1.0 / t.kappa;
          w = soft_weights(batch.fake_row_labels, t.y_c, nu, cfg_.weight_threshold);
          break;
        }
        case VicinityMode::hybrid_av: {
          VicinityParams p;
          p.kappa = t.kappa;
          p.nu = cfg_.decay_exponent == 2 ? 1.0 / (t.kappa * t.kappa) : 1.0 / t.kappa;
          w = hybrid_weights(batch.fake_row_labels, t.y_c, p, cfg_.weight_threshold);
          break;
        }
      }
      for (std::size_t k = 0; k < w.size(); ++k)
        t.fake_weights[static_cast<std::size_t>(w.indices[k])] = w.weights[k];
    }
  } else {
    for (auto& t : batch.targets)
      t.fake_weights.assign(static_cast<std::size_t>(cfg_.fakes_per_target),
                            1.0 / static_cast<double>(cfg_.fakes_per_target));
  }
  return batch;
}

GenBatch Trainer::make_gen_batch() {
  GenBatch batch;
  batch.targets = sample_targets(index_, cfg_.batch_size, sigma_, rng_);
  batch.z = Tensor::randn(cfg_.batch_size, cfg_.noise_dim, rng_);
  return batch;
}

StepLoss Trainer::disc_step(const DiscBatch& batch) {
  Tape tape;
  BoundParams disc_bp = bind_params(tape, disc_, true);

  // Gather real rows, labels = the target's conditional label per row.
  std::vector<std::int64_t> flat_rows;
  std::vector<double> real_row_labels;
  for (const auto& t : batch.targets) {
    flat_rows.insert(flat_rows.end(), t.real_rows.begin(), t.real_rows.end());
    real_row_labels.insert(real_row_labels.end(), t.real_rows.size(), t.y_c);
  }
  Var real_x = tape.leaf(data_->rows(flat_rows));
  DiscOutputs d_real = disc_forward(tape, disc_bp, disc_cfg_, real_x, real_row_labels);

  // Fakes are constants on the discriminator tape.
  Tensor fake_x = generator_sample(gen_, gen_cfg_, batch.z, batch.fake_row_labels);
  Var fake_x_var = tape.leaf(fake_x);
  DiscOutputs d_fake = disc_forward(tape, disc_bp, disc_cfg_, fake_x_var, batch.fake_row_labels);

  std::vector<VicinalGroup> groups(batch.targets.size());
  std::int64_t real_off = 0, fake_off = 0;
  double max_kappa = 0.0, sum_kappa = 0.0;
  for (std::size_t j = 0; j < batch.targets.size(); ++j) {
    const DiscTarget& t = batch.targets[j];
    VicinalGroup& g = groups[j];
    auto n_real = static_cast<std::int64_t>(t.real_rows.size());
    g.real_scores = tape.row_slice(d_real.adv, real_off, n_real);
    g.real_weights = t.real_weights;
    real_off += n_real;
    if (batch.pool_fakes) {
      g.fake_scores = d_fake.adv;
      g.fake_weights = t.fake_weights;
    } else {
      g.fake_scores = tape.row_slice(d_fake.adv, fake_off, cfg_.fakes_per_target);
      g.fake_weights = t.fake_weights;
      fake_off += cfg_.fakes_per_target;
    }
    max_kappa = std::max(max_kappa, t.kappa);
    sum_kappa += t.kappa;
  }

  Var adv = vicinal_disc_loss(tape, groups, cfg_.loss_form);

  double gamma = cfg_.weights.gamma_mode == GammaMode::batch_max_kappa ? max_kappa
                                                                       : cfg_.weights.gamma_fixed;
  Var reg, dre;
  if (cfg_.weights.lambda_reg_d > 0.0) {
    std::vector<double> fake_targets;
    if (surrogate_) {
      Tensor pred = surrogate_predict(*surrogate_, fake_x);
      fake_targets.assign(pred.data.begin(), pred.data.end());
    } else {
      fake_targets = batch.fake_row_labels;
    }
    reg = disc_reg_loss(tape, real_row_labels, d_real.y_hat, fake_targets, d_fake.y_hat, gamma);
  }
  if (cfg_.weights.lambda_dre_d > 0.0)
    dre = dre_loss(tape, d_fake.dre, d_real.dre, cfg_.weights.lambda_dre);

  Var total = total_disc_loss(tape, adv, reg, dre, cfg_.weights);
  tape.backward(total);
  opt_disc_.step(disc_, disc_bp.gather_grads());
  if (cfg_.spectral_clip) spectral_clip(disc_, power_, cfg_.spectral_clip_limit);

  ++disc_steps_done_;
  clamp_events_ += tape.clamp_events();

  StepLoss s;
  s.d_adv = tape.value_scalar(adv);
  s.d_reg = reg.valid() ? tape.value_scalar(reg) : 0.0;
  s.d_dre = dre.valid() ? tape.value_scalar(dre) : 0.0;
  s.gamma = gamma;
  s.mean_kappa = sum_kappa / static_cast<double>(batch.targets.size());
  return s;
}

StepLoss Trainer::gen_step(const GenBatch& batch) {
  Tape tape;
  BoundParams gen_bp = bind_params(tape, gen_, true);
  BoundParams disc_bp = bind_params(tape, disc_, false);

  Var fake_x = generator_forward(tape, gen_bp, gen_cfg_, batch.z, batch.targets);
  DiscOutputs d = disc_forward(tape, disc_bp, disc_cfg_, fake_x, batch.targets);

  Var adv = gen_adv_loss(tape, d.adv, cfg_.loss_form);
  Var reg, f;
  if (cfg_.weights.lambda_reg_g > 0.0) reg = gen_reg_penalty(tape, batch.targets, d.y_hat);
  if (cfg_.weights.lambda_f_g > 0.0) f = gen_f_penalty(tape, d.dre);

  Var total = total_gen_loss(tape, adv, reg, f, cfg_.weights);
  tape.backward(total);
  opt_gen_.step(gen_, gen_bp.gather_grads());

  ++gen_steps_done_;
  clamp_events_ += tape.clamp_events();
  if (gen_steps_done_ <= cfg_.ema_start) {
    ema_.shadow = gen_;  // EMA tracks live until blending begins
  } else {
    ema_update(ema_, gen_);
  }

  StepLoss s;
  s.g_adv = tape.value_scalar(adv);
  s.g_reg = reg.valid() ? tape.value_scalar(reg) : 0.0;
  s.g_f = f.valid() ? tape.value_scalar(f) : 0.0;
  return s;
}

TrainResult Trainer::train(const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream log(out_dir / "training_log.csv", std::ios::trunc);
  if (!log) throw DataError("cannot open training log in '" + out_dir.string() + "'");
  log << "step,d_adv,d_reg,d_dre,g_adv,g_reg,g_f,gamma,mean_kappa\n";

  auto write_checkpoint = [&](const std::filesystem::path& path, const std::string& kind,
                              std::int64_t step) {
    Checkpoint ckpt;
    CheckpointMeta meta;
    meta.kind = kind;
    meta.step = step;
    meta.gen = gen_cfg_;
    meta.disc = disc_cfg_;
    meta.raw_min = cfg_.raw_min;
    meta.raw_max = cfg_.raw_max;
    ckpt.meta_json = make_checkpoint_meta(meta);
    if (kind == "ema_generator") {
      ckpt.sections["gen"] = ema_.shadow;
    } else {
      ckpt.sections["gen"] = gen_;
      ckpt.sections["disc"] = disc_;
      ckpt.sections["ema"] = ema_.shadow;
    }
    save_checkpoint(path, ckpt);
  };

  TrainResult result;
  char row[320];
  try {
    for (std::int64_t step = 1; step <= cfg_.steps; ++step) {
      StepLoss acc;
      for (std::int64_t k = 0; k < cfg_.num_d_steps; ++k) {
        StepLoss s = disc_step();
        acc.d_adv += s.d_adv;
        acc.d_reg += s.d_reg;
        acc.d_dre += s.d_dre;
        acc.gamma += s.gamma;
        acc.mean_kappa += s.mean_kappa;
      }
      double inv = 1.0 / static_cast<double>(cfg_.num_d_steps);
      StepLoss g = gen_step();
      std::snprintf(row, sizeof(row), "%lld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                    static_cast<long long>(step), acc.d_adv * inv, acc.d_reg * inv,
                    acc.d_dre * inv, g.g_adv, g.g_reg, g.g_f, acc.gamma * inv,
                    acc.mean_kappa * inv);
      log << row;
      result.completed_steps = step;
      if (step % cfg_.checkpoint_every == 0)
        write_checkpoint(out_dir / ("checkpoint_" + std::to_string(step) + ".bin"), "train", step);
    }
  } catch (const NumericalError& e) {
    result.aborted = true;
    result.abort_reason = e.what();
  }
  log.flush();
  result.log_clamp_events = clamp_events_;
  if (!result.aborted)
    write_checkpoint(out_dir / "final_ema.bin", "ema_generator", result.completed_steps);
  return result;
}

std::string make_checkpoint_meta(const CheckpointMeta& meta) {
  json j;
  j["kind"] = meta.kind;
  j["step"] = meta.step;
  j["gen"] = {{"noise_dim", meta.gen.noise_dim},
              {"embed_width", meta.gen.embed_width},
              {"hidden", meta.gen.hidden},
              {"data_dim", meta.gen.data_dim}};
  j["disc"] = {{"trunk_hidden", meta.disc.trunk_hidden},
               {"reg_hidden", meta.disc.reg_hidden},
               {"dre_hidden", meta.disc.dre_hidden},
               {"data_dim", meta.disc.data_dim}};
  j["raw_min"] = meta.raw_min;
  j["raw_max"] = meta.raw_max;
  return j.dump();
}

CheckpointMeta parse_checkpoint_meta(const std::string& json_text) {
  json j = json::parse(json_text);
  CheckpointMeta meta;
  meta.kind = j.value("kind", "train");
  meta.step = j.value("step", std::int64_t{0});
  if (j.contains("gen")) {
    const auto& g = j["gen"];
    meta.gen.noise_dim = g.value("noise_dim", std::int64_t{8});
    meta.gen.embed_width = g.value("embed_width", std::int64_t{16});
    meta.gen.hidden = g.value("hidden", std::vector<std::int64_t>{64, 64});
    meta.gen.data_dim = g.value("data_dim", std::int64_t{2});
  }
  if (j.contains("disc")) {
    const auto& d = j["disc"];
    meta.disc.trunk_hidden = d.value("trunk_hidden", std::vector<std::int64_t>{64, 64});
    meta.disc.reg_hidden = d.value("reg_hidden", std::int64_t{64});
    meta.disc.dre_hidden = d.value("dre_hidden", std::int64_t{64});
    meta.disc.data_dim = d.value("data_dim", std::int64_t{2});
  }
  meta.raw_min = j.value("raw_min", 0.0);
  meta.raw_max = j.value("raw_max", 1.0);
  return meta;
}

namespace {

void read_sigma_like(const json& j, const char* key, double& field) {
  if (!j.contains(key)) return;
  if (j[key].is_string()) {
    if (j[key] != "rule_of_thumb")
      throw InvalidSpec(std::string("config: ") + key + " must be a number or \"rule_of_thumb\"");
    field = -1.0;
  } else {
    field = j[key].get<double>();
    if (!(field > 0.0)) throw InvalidSpec(std::string("config: ") + key + " must be positive");
  }
}

}  // namespace

TrainConfig TrainConfig::from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  TrainConfig c;
  c.steps = j.value("steps", c.steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.optimizer = j.value("optimizer", c.optimizer);
  c.num_d_steps = j.value("num_D_steps", c.num_d_steps);
  if (j.contains("vicinity_mode")) c.vicinity_mode = parse_vicinity_mode(j["vicinity_mode"]);
  c.n_av = j.value("n_av", c.n_av);
  read_sigma_like(j, "sigma", c.sigma);
  read_sigma_like(j, "kappa", c.kappa);
  c.weight_threshold = j.value("weight_threshold", c.weight_threshold);
  c.decay_exponent = j.value("decay_exponent", c.decay_exponent);
  if (j.contains("loss_form")) c.loss_form = parse_adv_form(j["loss_form"]);
  if (j.contains("loss_weights")) {
    const auto& w = j["loss_weights"];
    c.weights.lambda_reg_d = w.value("lambda_reg_D", c.weights.lambda_reg_d);
    c.weights.lambda_dre_d = w.value("lambda_dre_D", c.weights.lambda_dre_d);
    c.weights.lambda_reg_g = w.value("lambda_reg_G", c.weights.lambda_reg_g);
    c.weights.lambda_f_g = w.value("lambda_f_G", c.weights.lambda_f_g);
    c.weights.lambda_dre = w.value("lambda_dre", c.weights.lambda_dre);
    if (w.contains("gamma_mode")) {
      std::string gm = w["gamma_mode"];
      if (gm == "batch_max_kappa")
        c.weights.gamma_mode = GammaMode::batch_max_kappa;
      else if (gm == "fixed")
        c.weights.gamma_mode = GammaMode::fixed;
      else
        throw InvalidSpec("config: unknown gamma_mode '" + gm + "'");
    }
    c.weights.gamma_fixed = w.value("gamma_fixed", c.weights.gamma_fixed);
  }
  c.ema_decay = j.value("ema_decay", c.ema_decay);
  c.ema_start = j.value("ema_start", c.ema_start);
  c.seed = j.value("seed", c.seed);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.reals_per_target = j.value("reals_per_target", c.reals_per_target);
  c.fakes_per_target = j.value("fakes_per_target", c.fakes_per_target);
  c.fake_pool_weighting = j.value("fake_pool_weighting", c.fake_pool_weighting);
  c.use_surrogate_for_fake_reg = j.value("use_surrogate_for_fake_reg", c.use_surrogate_for_fake_reg);
  c.spectral_clip = j.value("spectral_clip", c.spectral_clip);
  c.spectral_clip_limit = j.value("spectral_clip_limit", c.spectral_clip_limit);
  c.noise_dim = j.value("noise_dim", c.noise_dim);
  c.gen_hidden = j.value("gen_hidden", c.gen_hidden);
  c.disc_hidden = j.value("disc_hidden", c.disc_hidden);
  c.embed_width = j.value("embed_width", c.embed_width);
  c.raw_min = j.value("raw_min", c.raw_min);
  c.raw_max = j.value("raw_max", c.raw_max);
  c.validate();
  return c;
}

std::string TrainConfig::to_json() const {
  json j;
  j["steps"] = steps;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["momentum"] = momentum;
  j["optimizer"] = optimizer;
  j["num_D_steps"] = num_d_steps;
  j["vicinity_mode"] = vicinity_mode_name(vicinity_mode);
  j["n_av"] = n_av;
  if (sigma < 0.0)
    j["sigma"] = "rule_of_thumb";
  else
    j["sigma"] = sigma;
  if (kappa < 0.0)
    j["kappa"] = "rule_of_thumb";
  else
    j["kappa"] = kappa;
  j["weight_threshold"] = weight_threshold;
  j["decay_exponent"] = decay_exponent;
  j["loss_form"] = loss_form == AdvForm::hinge ? "hinge" : "vanilla";
  j["loss_weights"] = {
      {"lambda_reg_D", weights.lambda_reg_d},
      {"lambda_dre_D", weights.lambda_dre_d},
      {"lambda_reg_G", weights.lambda_reg_g},
      {"lambda_f_G", weights.lambda_f_g},
      {"lambda_dre", weights.lambda_dre},
      {"gamma_mode", weights.gamma_mode == GammaMode::fixed ? "fixed" : "batch_max_kappa"},
      {"gamma_fixed", weights.gamma_fixed},
  };
  j["ema_decay"] = ema_decay;
  j["ema_start"] = ema_start;
  j["seed"] = seed;
  j["checkpoint_every"] = checkpoint_every;
  j["reals_per_target"] = reals_per_target;
  j["fakes_per_target"] = fakes_per_target;
  j["fake_pool_weighting"] = fake_pool_weighting;
  j["use_surrogate_for_fake_reg"] = use_surrogate_for_fake_reg;
  j["spectral_clip"] = spectral_clip;
  j["spectral_clip_limit"] = spectral_clip_limit;
  j["noise_dim"] = noise_dim;
  j["gen_hidden"] = gen_hidden;
  j["disc_hidden"] = disc_hidden;
  j["embed_width"] = embed_width;
  if (!std::isnan(raw_min)) j["raw_min"] = raw_min;
  if (!std::isnan(raw_max)) j["raw_max"] = raw_max;
  return j.dump(2);
}

}  // namespace vccgm
