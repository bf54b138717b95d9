#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vccgm/tensor.hpp"

namespace vccgm {

// Handle to a node on a Tape. Default-constructed handles are invalid and
// stand for "absent" (e.g. a disabled loss component).
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode autodiff tape over 2-D tensors. Each op records its output
// value and a backward closure; backward() traverses in exact reverse
// order and accumulates gradients additively at fan-out. A Tape is
// single-threaded; independent Tapes may run on parallel workers.
class Tape {
 public:
  Var leaf(Tensor value, bool requires_grad = false);
  Var constant(double v) { return leaf(Tensor::scalar(v)); }

  // c = a . b
  Var matmul(Var a, Var b);
  // elementwise, same shape
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  // a (n x m) + bias (1 x m), broadcast over rows; the only broadcast form
  Var add_bias(Var a, Var bias);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var neg(Var a) { return scale(a, -1.0); }

  Var relu(Var a);
  Var leaky_relu(Var a, double alpha);
  Var sigmoid(Var a);
  Var softplus(Var a);
  Var tanh_act(Var a);
  Var square(Var a);
  Var abs(Var a);
  // elementwise max(x, c); subgradient 0 at the kink
  Var max_with(Var a, double c);
  // log(max(x, 1e-12)); clamp events are counted (see clamp_events())
  Var log_clamped(Var a);

  // reductions -> 1 x 1
  Var sum(Var a);
  Var mean(Var a);
  // (n x m) -> (n x 1)
  Var row_sum(Var a);

  // rows [r0, r0 + n) of a
  Var row_slice(Var a, std::int64_t r0, std::int64_t n);
  // [a | b] along columns
  Var concat_cols(Var a, Var b);

  const Tensor& value(Var v) const;
  double value_scalar(Var v) const;

  // Computes gradients of the scalar `loss` w.r.t. every requires_grad
  // leaf reachable from it. Callable once per tape.
  void backward(Var loss);
  const Tensor& grad(Var v) const;

  std::int64_t clamp_events() const { return clamp_events_; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    bool needs_grad = false;
    std::function<void(Tape&)> back;  // empty for leaves/constants
  };

  Var push(Tensor value, bool needs_grad, std::function<void(Tape&)> back);
  Var unary_elementwise(Var a, const char* name, double (*fwd)(double), double (*dfn)(double));
  Tensor& grad_buffer(std::int32_t id);
  const Node& node(Var v) const;
  void check_finite(const Tensor& t, const char* op) const;

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::int64_t clamp_events_ = 0;
  bool backward_done_ = false;
};

// Central-difference gradient check. `forward` evaluates the objective at
// the current parameter values; `gradients` returns the analytic gradient
// for each parameter in `params` (same order, same shapes). Returns the
// worst relative error over all coordinates, with denominator
// max(|analytic|, |numeric|, floor). The floor keeps h^2 truncation noise
// on near-zero coordinates from dominating; a wrong gradient still lands
// at O(1) relative error.
struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::int64_t worst_coord = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

GradCheckReport grad_check(const std::function<double()>& forward,
                           const std::function<std::vector<Tensor>()>& gradients,
                           std::span<Tensor* const> params, double fd_step,
                           double denom_floor = 1e-2);

}  // namespace vccgm
