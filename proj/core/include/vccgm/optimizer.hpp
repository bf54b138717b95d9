#pragma once

#include <map>
#include <string>

#include "vccgm/params.hpp"

namespace vccgm {

// Gradient-descent update over a ParamStore. Momentum SGD is the default
// training rule; Adam is available where adaptivity helps (surrogate
// regressor, DRE-only fits).
class Optimizer {
 public:
  enum class Kind { momentum, adam };

  Optimizer(Kind kind, double lr, double momentum = 0.5)
      : kind_(kind), lr_(lr), momentum_(momentum) {}

  void step(ParamStore& params, const std::map<std::string, Tensor>& grads);

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

  static Kind parse(const std::string& name);

 private:
  Kind kind_;
  double lr_;
  double momentum_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t t_ = 0;
  ParamStore vel_;  // momentum buffers
  ParamStore m_, v_;  // adam moments
};

// One power-iteration step per weight matrix to estimate its largest
// singular value, then rescales W <- W * limit / sigma when sigma exceeds
// the limit. `power` holds the persistent iteration vectors, keyed by
// parameter name. Stands in for the spectral normalization used at image
// scale.
void spectral_clip(ParamStore& params, ParamStore& power, double limit);

}  // namespace vccgm
