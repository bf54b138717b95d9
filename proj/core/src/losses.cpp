#include "vccgm/losses.hpp"

#include "vccgm/errors.hpp"

namespace vccgm {

namespace {

// sum_i w_i * terms_i as a tape node
Var weighted_sum(Tape& tape, Var terms, std::span<const double> weights) {
  if (tape.value(terms).rows != static_cast<std::int64_t>(weights.size()) ||
      tape.value(terms).cols != 1)
    throw ShapeError("weighted_sum: weights do not match scores");
  Var w = tape.leaf(Tensor::column(weights));
  return tape.sum(tape.mul(w, terms));
}

// per-sample adversarial terms for the real side
Var real_terms(Tape& tape, Var scores, AdvForm form) {
  if (form == AdvForm::vanilla)
    return tape.neg(tape.log_clamped(tape.sigmoid(scores)));  // -log D
  // max(0, 1 - s)
  return tape.max_with(tape.add_scalar(tape.neg(scores), 1.0), 0.0);
}

// per-sample adversarial terms for the fake side
Var fake_terms(Tape& tape, Var scores, AdvForm form) {
  if (form == AdvForm::vanilla) {
    // -log(1 - D) = -log(sigmoid(-s))
    return tape.neg(tape.log_clamped(tape.sigmoid(tape.neg(scores))));
  }
  // max(0, 1 + s)
  return tape.max_with(tape.add_scalar(scores, 1.0), 0.0);
}

Var reg_side(Tape& tape, std::span<const double> target, Var y_hat, double gamma) {
  Var t = tape.leaf(Tensor::column(target));
  Var err = tape.abs(tape.sub(t, y_hat));
  return tape.mean(tape.max_with(tape.add_scalar(err, -gamma), 0.0));
}

}  // namespace

AdvForm parse_adv_form(const std::string& name) {
  if (name == "vanilla") return AdvForm::vanilla;
  if (name == "hinge") return AdvForm::hinge;
  throw InvalidSpec("unknown adversarial form '" + name + "'");
}

Var vicinal_disc_loss(Tape& tape, std::span<const VicinalGroup> groups, AdvForm form) {
  Var real_total, fake_total;
  std::int64_t real_groups = 0, fake_groups = 0;
  for (const auto& g : groups) {
    if (g.real_scores.valid() && !g.real_weights.empty()) {
      Var term = weighted_sum(tape, real_terms(tape, g.real_scores, form), g.real_weights);
      real_total = real_total.valid() ? tape.add(real_total, term) : term;
      ++real_groups;
    }
    if (g.fake_scores.valid() && !g.fake_weights.empty()) {
      Var term = weighted_sum(tape, fake_terms(tape, g.fake_scores, form), g.fake_weights);
      fake_total = fake_total.valid() ? tape.add(fake_total, term) : term;
      ++fake_groups;
    }
  }
  if (!real_total.valid() && !fake_total.valid())
    throw ShapeError("vicinal_disc_loss: no scores supplied");
  Var loss;
  if (real_total.valid()) loss = tape.scale(real_total, 1.0 / static_cast<double>(real_groups));
  if (fake_total.valid()) {
    Var f = tape.scale(fake_total, 1.0 / static_cast<double>(fake_groups));
    loss = loss.valid() ? tape.add(loss, f) : f;
  }
  return loss;
}

Var gen_adv_loss(Tape& tape, Var fake_scores, AdvForm form) {
  if (form == AdvForm::vanilla)
    return tape.mean(tape.neg(tape.log_clamped(tape.sigmoid(fake_scores))));
  return tape.mean(tape.neg(fake_scores));
}

Var disc_reg_loss(Tape& tape, std::span<const double> y_real_target, Var y_hat_real,
                  std::span<const double> y_fake_target, Var y_hat_fake, double gamma) {
  if (gamma < 0.0) throw InvalidSpec("disc_reg_loss: gamma must be >= 0");
  Var loss;
  if (y_hat_real.valid() && !y_real_target.empty()) {
    loss = reg_side(tape, y_real_target, y_hat_real, gamma);
  }
  if (y_hat_fake.valid() && !y_fake_target.empty()) {
    Var f = reg_side(tape, y_fake_target, y_hat_fake, gamma);
    loss = loss.valid() ? tape.add(loss, f) : f;
  }
  if (!loss.valid()) throw ShapeError("disc_reg_loss: no predictions supplied");
  return loss;
}

Var dre_loss(Tape& tape, Var dre_fake, Var dre_real, double lambda_dre) {
  if (lambda_dre < 0.0) throw InvalidSpec("dre_loss: lambda_dre must be >= 0");
  // mean_fake[sigmoid(f) f - softplus(f)]
  Var fake_term = tape.mean(tape.sub(tape.mul(tape.sigmoid(dre_fake), dre_fake),
                                     tape.softplus(dre_fake)));
  // - mean_real[sigmoid(f)]
  Var real_term = tape.mean(tape.sigmoid(dre_real));
  Var loss = tape.sub(fake_term, real_term);
  if (lambda_dre > 0.0) {
    Var penalty = tape.square(tape.add_scalar(tape.mean(dre_fake), -1.0));
    loss = tape.add(loss, tape.scale(penalty, lambda_dre));
  }
  return loss;
}

Var gen_reg_penalty(Tape& tape, std::span<const double> y_cond, Var y_hat_fake) {
  Var t = tape.leaf(Tensor::column(y_cond));
  return tape.mean(tape.abs(tape.sub(t, y_hat_fake)));
}

Var gen_f_penalty(Tape& tape, Var dre_fake) {
  const Tensor& v = tape.value(dre_fake);
  for (double x : v.data)
    if (!(x > 0.0))
      throw NumericalError("gen_f_penalty: density-ratio estimate not positive");
  return tape.mean(tape.square(tape.add_scalar(dre_fake, -1.0)));
}

Var total_disc_loss(Tape& tape, Var adv, Var reg, Var dre, const LossWeights& w) {
  if (w.lambda_reg_d < 0.0 || w.lambda_dre_d < 0.0)
    throw InvalidSpec("total_disc_loss: weights must be >= 0");
  Var loss = adv;
  if (reg.valid() && w.lambda_reg_d != 0.0) loss = tape.add(loss, tape.scale(reg, w.lambda_reg_d));
  if (dre.valid() && w.lambda_dre_d != 0.0) loss = tape.add(loss, tape.scale(dre, w.lambda_dre_d));
  return loss;
}

Var total_gen_loss(Tape& tape, Var adv, Var reg, Var f, const LossWeights& w) {
  if (w.lambda_reg_g < 0.0 || w.lambda_f_g < 0.0)
    throw InvalidSpec("total_gen_loss: weights must be >= 0");
  Var loss = adv;
  if (reg.valid() && w.lambda_reg_g != 0.0) loss = tape.add(loss, tape.scale(reg, w.lambda_reg_g));
  if (f.valid() && w.lambda_f_g != 0.0) loss = tape.add(loss, tape.scale(f, w.lambda_f_g));
  return loss;
}

}  // namespace vccgm
