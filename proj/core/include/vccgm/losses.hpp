#pragma once

#include <span>
#include <string>
#include <vector>

#include "vccgm/tape.hpp"

namespace vccgm {

enum class AdvForm { vanilla, hinge };
enum class GammaMode { batch_max_kappa, fixed };

AdvForm parse_adv_form(const std::string& name);

struct LossWeights {
  double lambda_reg_d = 1.0;
  double lambda_dre_d = 1.0;
  double lambda_reg_g = 1.0;
  double lambda_f_g = 0.5;
  double lambda_dre = 1e-2;  // inner DRE regularizer coefficient
  GammaMode gamma_mode = GammaMode::batch_max_kappa;
  double gamma_fixed = 0.0;
};

// Scores plus normalized vicinal weights for one conditional target
// label. Either side may be empty.
struct VicinalGroup {
  Var real_scores;                  // k x 1
  std::vector<double> real_weights; // k, sum to 1
  Var fake_scores;                  // m x 1
  std::vector<double> fake_weights; // m, sum to 1
};

// Vicinal adversarial discriminator loss, averaged over target labels.
// Vanilla: -sum_i W_i log D - sum_i W_i log(1 - D) with D = sigmoid(s),
// probabilities clamped at 1e-12 (clamps counted on the tape). Hinge:
// sum_i W_i max(0, 1 - s_r) + sum_i W_i max(0, 1 + s_g).
Var vicinal_disc_loss(Tape& tape, std::span<const VicinalGroup> groups, AdvForm form);

// Generator adversarial loss over fake scores: vanilla
// mean(-log sigmoid(s)), hinge mean(-s).
Var gen_adv_loss(Tape& tape, Var fake_scores, AdvForm form);

// gamma-insensitive regression loss: mean over reals of
// max(|y_target - y_hat| - gamma, 0) plus the same mean over fakes.
// Either side may be absent (invalid Var).
Var disc_reg_loss(Tape& tape, std::span<const double> y_real_target, Var y_hat_real,
                  std::span<const double> y_fake_target, Var y_hat_fake, double gamma);

// Penalized softplus density-ratio loss over head outputs f:
// mean_fake[sigmoid(f) f - softplus(f)] - mean_real[sigmoid(f)]
// + lambda * (mean_fake f - 1)^2.
Var dre_loss(Tape& tape, Var dre_fake, Var dre_real, double lambda_dre);

// Mean absolute error between the conditional labels and the regression
// head's predictions on fakes.
Var gen_reg_penalty(Tape& tape, std::span<const double> y_cond, Var y_hat_fake);

// Plug-in Pearson chi-square penalty: mean((f - 1)^2) over positive
// density-ratio estimates.
Var gen_f_penalty(Tape& tape, Var dre_fake);

// adv + lambda_reg * reg + lambda_dre * dre; absent components contribute 0.
Var total_disc_loss(Tape& tape, Var adv, Var reg, Var dre, const LossWeights& w);
// adv + lambda_reg * reg + lambda_f * f
Var total_gen_loss(Tape& tape, Var adv, Var reg, Var f, const LossWeights& w);

}  // namespace vccgm
