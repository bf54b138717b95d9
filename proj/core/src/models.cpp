#include "vccgm/models.hpp"

#include <algorithm>
#include <cmath>

#include "vccgm/optimizer.hpp"

namespace vccgm {

namespace {

constexpr double kLeak = 0.2;

Tensor init_weight(std::int64_t fan_in, std::int64_t fan_out, Rng& rng) {
  return Tensor::randn(fan_in, fan_out, rng, std::sqrt(1.0 / static_cast<double>(fan_in)));
}

// h = lrelu(x W + b) stack over named layers "prefix.l<i>.{w,b}"
Var mlp_forward(Tape& tape, const BoundParams& bp, const std::string& prefix, Var x,
                std::int64_t layers, bool relu_act) {
  Var h = x;
  for (std::int64_t i = 0; i < layers; ++i) {
    std::string base = prefix + ".l" + std::to_string(i);
    h = tape.add_bias(tape.matmul(h, bp.at(base + ".w")), bp.at(base + ".b"));
    h = relu_act ? tape.relu(h) : tape.leaky_relu(h, kLeak);
  }
  return h;
}

}  // namespace

Tensor label_features(std::span<const double> y) {
  Tensor f(static_cast<std::int64_t>(y.size()), kLabelFeatureDim);
  for (std::size_t i = 0; i < y.size(); ++i) {
    f.at(static_cast<std::int64_t>(i), 0) = y[i];
    f.at(static_cast<std::int64_t>(i), 1) = std::sin(2.0 * M_PI * y[i]);
    f.at(static_cast<std::int64_t>(i), 2) = std::cos(2.0 * M_PI * y[i]);
  }
  return f;
}

ParamStore init_generator(const GeneratorConfig& cfg, Rng& rng) {
  ParamStore p;
  p.add("embed.w", init_weight(kLabelFeatureDim, cfg.embed_width, rng));
  std::int64_t in = cfg.noise_dim + cfg.embed_width;
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    std::string base = "body.l" + std::to_string(i);
    p.add(base + ".w", init_weight(in, cfg.hidden[i], rng));
    p.add(base + ".b", Tensor::zeros(1, cfg.hidden[i]));
    in = cfg.hidden[i];
  }
  p.add("out.w", init_weight(in, cfg.data_dim, rng));
  p.add("out.b", Tensor::zeros(1, cfg.data_dim));
  return p;
}

ParamStore init_discriminator(const DiscriminatorConfig& cfg, Rng& rng) {
  ParamStore p;
  std::int64_t in = cfg.data_dim;
  for (std::size_t i = 0; i < cfg.trunk_hidden.size(); ++i) {
    std::string base = "trunk.l" + std::to_string(i);
    p.add(base + ".w", init_weight(in, cfg.trunk_hidden[i], rng));
    p.add(base + ".b", Tensor::zeros(1, cfg.trunk_hidden[i]));
    in = cfg.trunk_hidden[i];
  }
  const std::int64_t feat = cfg.feature_width();
  p.add("proj.w", init_weight(kLabelFeatureDim, feat, rng));
  p.add("adv.w", init_weight(feat, 1, rng));
  p.add("adv.b", Tensor::zeros(1, 1));
  p.add("reg.l0.w", init_weight(feat, cfg.reg_hidden, rng));
  p.add("reg.l0.b", Tensor::zeros(1, cfg.reg_hidden));
  p.add("reg.l1.w", init_weight(cfg.reg_hidden, 1, rng));
  p.add("reg.l1.b", Tensor::zeros(1, 1));
  p.add("dre.l0.w", init_weight(feat, cfg.dre_hidden, rng));
  p.add("dre.l0.b", Tensor::zeros(1, cfg.dre_hidden));
  p.add("dre.l1.w", init_weight(cfg.dre_hidden, cfg.dre_hidden, rng));
  p.add("dre.l1.b", Tensor::zeros(1, cfg.dre_hidden));
  p.add("dre.l2.w", init_weight(cfg.dre_hidden, 1, rng));
  p.add("dre.l2.b", Tensor::zeros(1, 1));
  return p;
}

Var BoundParams::at(const std::string& name) const {
  auto it = vars.find(name);
  if (it == vars.end()) throw Error("bound parameter '" + name + "' not found");
  return it->second;
}

std::map<std::string, Tensor> BoundParams::gather_grads() const {
  std::map<std::string, Tensor> grads;
  for (const auto& [name, var] : vars) grads.emplace(name, tape->grad(var));
  return grads;
}

BoundParams bind_params(Tape& tape, const ParamStore& store, bool trainable) {
  BoundParams bp;
  bp.tape = &tape;
  for (const auto& [name, t] : store.arrays) bp.vars.emplace(name, tape.leaf(t, trainable));
  return bp;
}

Var generator_forward(Tape& tape, const BoundParams& gen, const GeneratorConfig& cfg,
                      const Tensor& z, std::span<const double> y) {
  if (z.cols != cfg.noise_dim)
    throw ShapeError("generator_forward: z has " + std::to_string(z.cols) + " cols, want " +
                     std::to_string(cfg.noise_dim));
  if (static_cast<std::size_t>(z.rows) != y.size())
    throw ShapeError("generator_forward: z rows and y length differ");
  Var yf = tape.leaf(label_features(y));
  Var emb = tape.matmul(yf, gen.at("embed.w"));
  Var h = tape.concat_cols(tape.leaf(z), emb);
  h = mlp_forward(tape, gen, "body", h, static_cast<std::int64_t>(cfg.hidden.size()), false);
  return tape.add_bias(tape.matmul(h, gen.at("out.w")), gen.at("out.b"));
}

DiscOutputs disc_forward(Tape& tape, const BoundParams& disc, const DiscriminatorConfig& cfg,
                         Var x, std::span<const double> y) {
  if (tape.value(x).cols != cfg.data_dim)
    throw ShapeError("disc_forward: x has " + std::to_string(tape.value(x).cols) +
                     " cols, want " + std::to_string(cfg.data_dim));
  if (static_cast<std::size_t>(tape.value(x).rows) != y.size())
    throw ShapeError("disc_forward: x rows and y length differ");

  DiscOutputs out;
  out.h = mlp_forward(tape, disc, "trunk", x,
                      static_cast<std::int64_t>(cfg.trunk_hidden.size()), false);

  // adversarial head + label projection
  Var fadv = tape.add_bias(tape.matmul(out.h, disc.at("adv.w")), disc.at("adv.b"));
  Var yf = tape.leaf(label_features(y));
  Var emb = tape.matmul(yf, disc.at("proj.w"));
  Var proj = tape.row_sum(tape.mul(emb, out.h));
  out.adv = tape.add(fadv, proj);

  // two-layer regression head
  Var r = tape.relu(tape.add_bias(tape.matmul(out.h, disc.at("reg.l0.w")), disc.at("reg.l0.b")));
  out.y_hat = tape.add_bias(tape.matmul(r, disc.at("reg.l1.w")), disc.at("reg.l1.b"));

  // three-layer DRE head, softplus output for positivity
  Var d0 = tape.relu(tape.add_bias(tape.matmul(out.h, disc.at("dre.l0.w")), disc.at("dre.l0.b")));
  Var d1 = tape.relu(tape.add_bias(tape.matmul(d0, disc.at("dre.l1.w")), disc.at("dre.l1.b")));
  Var raw = tape.add_bias(tape.matmul(d1, disc.at("dre.l2.w")), disc.at("dre.l2.b"));
  out.dre = tape.softplus(raw);
  return out;
}

Tensor generator_sample(const ParamStore& gen, const GeneratorConfig& cfg, const Tensor& z,
                        std::span<const double> y) {
  Tape tape;
  BoundParams bp = bind_params(tape, gen, false);
  Var x = generator_forward(tape, bp, cfg, z, y);
  return tape.value(x);
}

void ema_update(EmaState& ema, const ParamStore& live) {
  if (!ema.shadow.same_layout(live))
    throw ShapeError("ema_update: shadow and live parameter layouts differ");
  auto s = ema.shadow.arrays.begin();
  auto l = live.arrays.begin();
  for (; s != ema.shadow.arrays.end(); ++s, ++l) {
    double b = ema.decay;
    for (std::int64_t i = 0; i < s->second.size(); ++i) {
      auto idx = static_cast<std::size_t>(i);
      s->second.data[idx] = b * s->second.data[idx] + (1.0 - b) * l->second.data[idx];
    }
  }
}

namespace {

Var surrogate_forward_tape(Tape& tape, const BoundParams& bp, Var x, std::int64_t layers) {
  Var h = mlp_forward(tape, bp, "body", x, layers, true);
  return tape.add_bias(tape.matmul(h, bp.at("out.w")), bp.at("out.b"));
}

}  // namespace

SurrogateResult train_surrogate_regressor(const Dataset& ds, double raw_min, double raw_max,
                                          const SurrogateConfig& cfg) {
  if (ds.n() == 0) throw EmptyDataset("train_surrogate_regressor: empty dataset");
  if (!(raw_min < raw_max)) throw OutOfRange("train_surrogate_regressor: bad raw range");

  const std::int64_t n = ds.n();
  Rng rng(cfg.seed);

  // Deterministic shuffled split.
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = n - 1; i > 0; --i) {
    auto j = static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::int64_t n_val = std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                                     static_cast<double>(n) * cfg.val_fraction));
  if (n_val >= n) n_val = n - 1;
  std::vector<std::int64_t> val_idx(order.begin(), order.begin() + n_val);
  std::vector<std::int64_t> train_idx(order.begin() + n_val, order.end());

  auto norm_label = [&](std::int64_t i) {
    return (ds.labels[static_cast<std::size_t>(i)] - raw_min) / (raw_max - raw_min);
  };

  ParamStore params;
  {
    std::int64_t in = ds.d;
    for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
      std::string base = "body.l" + std::to_string(i);
      params.add(base + ".w", init_weight(in, cfg.hidden[i], rng));
      params.add(base + ".b", Tensor::zeros(1, cfg.hidden[i]));
      in = cfg.hidden[i];
    }
    params.add("out.w", init_weight(in, 1, rng));
    params.add("out.b", Tensor::zeros(1, 1));
  }

  Tensor val_x = ds.rows(val_idx);
  std::vector<double> val_y(val_idx.size());
  for (std::size_t i = 0; i < val_idx.size(); ++i) val_y[i] = norm_label(val_idx[i]);

  auto val_mae = [&](const ParamStore& ps) {
    Tensor pred = surrogate_predict(ps, val_x);
    double mae = 0.0;
    for (std::size_t i = 0; i < val_y.size(); ++i)
      mae += std::fabs(pred.data[i] - val_y[i]);
    return mae / static_cast<double>(val_y.size());
  };

  Optimizer opt(Optimizer::Kind::adam, cfg.lr);
  SurrogateResult result;
  std::int64_t batch = std::min<std::int64_t>(cfg.batch, static_cast<std::int64_t>(train_idx.size()));
  const std::int64_t layers = static_cast<std::int64_t>(cfg.hidden.size());

  for (std::int64_t step = 1; step <= cfg.max_steps; ++step) {
    std::vector<std::int64_t> pick(static_cast<std::size_t>(batch));
    std::vector<double> yb(static_cast<std::size_t>(batch));
    for (std::int64_t b = 0; b < batch; ++b) {
      auto k = train_idx[rng.uniform_index(train_idx.size())];
      pick[static_cast<std::size_t>(b)] = k;
      yb[static_cast<std::size_t>(b)] = norm_label(k);
    }
    Tape tape;
    BoundParams bp = bind_params(tape, params, true);
    Var pred = surrogate_forward_tape(tape, bp, tape.leaf(ds.rows(pick)), layers);
    Var target = tape.leaf(Tensor::column(yb));
    Var loss = tape.mean(tape.square(tape.sub(pred, target)));
    tape.backward(loss);
    opt.step(params, bp.gather_grads());
    result.steps = step;

    if (step % 100 == 0 || step == cfg.max_steps) {
      result.val_mae = val_mae(params);
      if (result.val_mae < cfg.target_mae) {
        result.reached_target = true;
        break;
      }
    }
  }
  if (!result.reached_target) result.val_mae = val_mae(params);
  result.params = std::move(params);
  return result;
}

Tensor surrogate_predict(const ParamStore& params, const Tensor& x) {
  Tape tape;
  BoundParams bp = bind_params(tape, params, false);
  std::int64_t layers = 0;
  while (params.has("body.l" + std::to_string(layers) + ".w")) ++layers;
  Var pred = surrogate_forward_tape(tape, bp, tape.leaf(x), layers);
  return tape.value(pred);
}

}  // namespace vccgm
