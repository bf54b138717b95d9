#include "vccgm/tape.hpp"

#include <cmath>

namespace vccgm {

namespace {

constexpr double kLogClamp = 1e-12;

// C += A . B, all row-major, shapes pre-checked.
void matmul_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::int64_t n = a.rows, k = a.cols, m = b.cols;
  const double* pa = a.data.data();
  const double* pb = b.data.data();
  double* pc = c.data.data();
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t kk = 0; kk < k; ++kk) {
      double av = pa[i * k + kk];
      if (av == 0.0) continue;
      const double* brow = pb + kk * m;
      double* crow = pc + i * m;
      for (std::int64_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

// C += A . B^T : C (n x k), A (n x m), B (k x m)
void matmul_bt_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::int64_t n = a.rows, m = a.cols, k = b.rows;
  const double* pa = a.data.data();
  const double* pb = b.data.data();
  double* pc = c.data.data();
  for (std::int64_t i = 0; i < n; ++i) {
    const double* arow = pa + i * m;
    for (std::int64_t kk = 0; kk < k; ++kk) {
      const double* brow = pb + kk * m;
      double acc = 0.0;
      for (std::int64_t j = 0; j < m; ++j) acc += arow[j] * brow[j];
      pc[i * k + kk] += acc;
    }
  }
}

// C += A^T . B : C (k x m), A (n x k), B (n x m)
void matmul_at_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::int64_t n = a.rows, k = a.cols, m = b.cols;
  const double* pa = a.data.data();
  const double* pb = b.data.data();
  double* pc = c.data.data();
  for (std::int64_t i = 0; i < n; ++i) {
    const double* brow = pb + i * m;
    for (std::int64_t kk = 0; kk < k; ++kk) {
      double av = pa[i * k + kk];
      if (av == 0.0) continue;
      double* crow = pc + kk * m;
      for (std::int64_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

void Tape::check_finite(const Tensor& t, const char* op) const {
  if (!t.all_finite())
    throw NumericalError(std::string("non-finite value produced by op '") + op + "'");
}

Var Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(value), needs_grad, std::move(back)});
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size())
    throw Error("invalid tape handle");
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

double Tape::value_scalar(Var v) const {
  const Tensor& t = value(v);
  if (t.size() != 1) throw ShapeError("value_scalar: tensor is not 1x1 " + t.shape_str());
  return t.data[0];
}

Tensor& Tape::grad_buffer(std::int32_t id) {
  Tensor& g = grads_[static_cast<std::size_t>(id)];
  if (g.rows == 0) {
    const Tensor& v = nodes_[static_cast<std::size_t>(id)].value;
    g = Tensor::zeros(v.rows, v.cols);
  }
  return g;
}

const Tensor& Tape::grad(Var v) const {
  if (!backward_done_) throw Error("grad queried before backward()");
  const Node& n = node(v);
  if (!n.needs_grad) throw Error("grad queried for a non-differentiable node");
  const Tensor& g = grads_[static_cast<std::size_t>(v.id)];
  if (g.rows == 0) {
    // Parameter reachable on the tape but unused by the loss: zero grad.
    static thread_local Tensor zero;
    zero = Tensor::zeros(n.value.rows, n.value.cols);
    return zero;
  }
  return g;
}

void Tape::backward(Var loss) {
  const Node& l = node(loss);
  if (l.value.size() != 1)
    throw ShapeError("backward: loss must be scalar, got " + l.value.shape_str());
  if (nodes_.empty()) throw Error("backward: empty tape");
  if (backward_done_) throw Error("backward: already run on this tape");
  grads_.assign(nodes_.size(), Tensor{});
  backward_done_ = true;
  grad_buffer(loss.id).data[0] = 1.0;
  for (std::int32_t id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.needs_grad || !n.back) continue;
    if (grads_[static_cast<std::size_t>(id)].rows == 0) continue;  // not on the loss path
    n.back(*this);
  }
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  check_finite(value, "leaf");
  return push(std::move(value), requires_grad, nullptr);
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.cols != tb.rows)
    throw ShapeError("matmul: inner dimensions differ " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = Tensor::zeros(ta.rows, tb.cols);
  matmul_acc(ta, tb, out);
  check_finite(out, "matmul");
  bool ng = node(a).needs_grad || node(b).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id, bi = b.id;
  return push(std::move(out), ng, [out_id, ai, bi](Tape& t) {
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    const Tensor& va = t.nodes_[static_cast<std::size_t>(ai)].value;
    const Tensor& vb = t.nodes_[static_cast<std::size_t>(bi)].value;
    if (t.nodes_[static_cast<std::size_t>(ai)].needs_grad)
      matmul_bt_acc(g, vb, t.grad_buffer(ai));  // gA += g . B^T
    if (t.nodes_[static_cast<std::size_t>(bi)].needs_grad)
      matmul_at_acc(va, g, t.grad_buffer(bi));  // gB += A^T . g
  });
}

Var Tape::add(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb))
    throw ShapeError("add: shape mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = ta;
  for (std::int64_t i = 0; i < out.size(); ++i) out.data[i] += tb.data[i];
  check_finite(out, "add");
  bool ng = node(a).needs_grad || node(b).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id, bi = b.id;
  return push(std::move(out), ng, [out_id, ai, bi](Tape& t) {
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    if (t.nodes_[static_cast<std::size_t>(ai)].needs_grad) {
      Tensor& ga = t.grad_buffer(ai);
      for (std::int64_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
    }
    if (t.nodes_[static_cast<std::size_t>(bi)].needs_grad) {
      Tensor& gb = t.grad_buffer(bi);
      for (std::int64_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i];
    }
  });
}

Var Tape::sub(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb))
    throw ShapeError("sub: shape mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = ta;
  for (std::int64_t i = 0; i < out.size(); ++i) out.data[i] -= tb.data[i];
  check_finite(out, "sub");
  bool ng = node(a).needs_grad || node(b).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id, bi = b.id;
  return push(std::move(out), ng, [out_id, ai, bi](Tape& t) {
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    if (t.nodes_[static_cast<std::size_t>(ai)].needs_grad) {
      Tensor& ga = t.grad_buffer(ai);
      for (std::int64_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
    }
    if (t.nodes_[static_cast<std::size_t>(bi)].needs_grad) {
      Tensor& gb = t.grad_buffer(bi);
      for (std::int64_t i = 0; i < g.size(); ++i) gb.data[i] -= g.data[i];
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb))
    throw ShapeError("mul: shape mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = ta;
  for (std::int64_t i = 0; i < out.size(); ++i) out.data[i] *= tb.data[i];
  check_finite(out, "mul");
  bool ng = node(a).needs_grad || node(b).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id, bi = b.id;
  return push(std::move(out), ng, [out_id, ai, bi](Tape& t) {
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    const Tensor& va = t.nodes_[static_cast<std::size_t>(ai)].value;
    const Tensor& vb = t.nodes_[static_cast<std::size_t>(bi)].value;
    if (t.nodes_[static_cast<std::size_t>(ai)].needs_grad) {
      Tensor& ga = t.grad_buffer(ai);
      for (std::int64_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * vb.data[i];
    }
    if (t.nodes_[static_cast<std::size_t>(bi)].needs_grad) {
      Tensor& gb = t.grad_buffer(bi);
      for (std::int64_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i] * va.data[i];
    }
  });
}

Var Tape::add_bias(Var a, Var bias) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(bias);
  if (tb.rows != 1 || tb.cols != ta.cols)
    throw ShapeError("add_bias: bias must be 1x" + std::to_string(ta.cols) + ", got " + tb.shape_str());
  Tensor out = ta;
  for (std::int64_t i = 0; i < ta.rows; ++i)
    for (std::int64_t j = 0; j < ta.cols; ++j) out.at(i, j) += tb.data[static_cast<std::size_t>(j)];
  check_finite(out, "add_bias");
  bool ng = node(a).needs_grad || node(bias).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id, bi = bias.id;
  return push(std::move(out), ng, [out_id, ai, bi](Tape& t) {
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    if (t.nodes_[static_cast<std::size_t>(ai)].needs_grad) {
      Tensor& ga = t.grad_buffer(ai);
      for (std::int64_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
    }
    if (t.nodes_[static_cast<std::size_t>(bi)].needs_grad) {
      Tensor& gb = t.grad_buffer(bi);
      for (std::int64_t i = 0; i < g.rows; ++i)
        for (std::int64_t j = 0; j < g.cols; ++j) gb.data[static_cast<std::size_t>(j)] += g.at(i, j);
    }
  });
}

Var Tape::scale(Var a, double c) {
  Tensor out = value(a);
  for (auto& v : out.data) v *= c;
  check_finite(out, "scale");
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai, c](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    Tensor& ga = t.grad_buffer(ai);
    for (std::int64_t i = 0; i < g.size(); ++i) ga.data[i] += c * g.data[i];
  });
}

Var Tape::add_scalar(Var a, double c) {
  Tensor out = value(a);
  for (auto& v : out.data) v += c;
  check_finite(out, "add_scalar");
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    Tensor& ga = t.grad_buffer(ai);
    for (std::int64_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
  });
}

// Shared plumbing for elementwise ops whose derivative is a function of the
// input value only.
Var Tape::unary_elementwise(Var a, const char* name, double (*fwd)(double), double (*dfn)(double)) {
  const Tensor& ta = value(a);
  Tensor out = ta;
  for (auto& v : out.data) v = fwd(v);
  check_finite(out, name);
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai, dfn](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    const Tensor& va = t.nodes_[static_cast<std::size_t>(ai)].value;
    Tensor& ga = t.grad_buffer(ai);
    for (std::int64_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * dfn(va.data[i]);
  });
}

Var Tape::relu(Var a) {
  return unary_elementwise(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x) { return x > 0.0 ? 1.0 : 0.0; });  // subgradient 0 at the kink
}

Var Tape::leaky_relu(Var a, double alpha) {
  const Tensor& ta = value(a);
  Tensor out = ta;
  for (auto& v : out.data) v = v > 0.0 ? v : alpha * v;
  check_finite(out, "leaky_relu");
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai, alpha](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    const Tensor& va = t.nodes_[static_cast<std::size_t>(ai)].value;
    Tensor& ga = t.grad_buffer(ai);
    for (std::int64_t i = 0; i < g.size(); ++i)
      ga.data[i] += g.data[i] * (va.data[i] > 0.0 ? 1.0 : alpha);
  });
}

Var Tape::sigmoid(Var a) {
  return unary_elementwise(a, "sigmoid", &stable_sigmoid, [](double x) {
    double s = stable_sigmoid(x);
    return s * (1.0 - s);
  });
}

Var Tape::softplus(Var a) {
  return unary_elementwise(a, "softplus", &stable_softplus, &stable_sigmoid);
}

Var Tape::tanh_act(Var a) {
  return unary_elementwise(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double x) {
        double th = std::tanh(x);
        return 1.0 - th * th;
      });
}

Var Tape::square(Var a) {
  return unary_elementwise(
      a, "square", [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
}

Var Tape::abs(Var a) {
  return unary_elementwise(
      a, "abs", [](double x) { return std::fabs(x); },
      [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var Tape::max_with(Var a, double c) {
  const Tensor& ta = value(a);
  Tensor out = ta;
  for (auto& v : out.data) v = v > c ? v : c;
  check_finite(out, "max_with");
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai, c](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    const Tensor& va = t.nodes_[static_cast<std::size_t>(ai)].value;
    Tensor& ga = t.grad_buffer(ai);
    for (std::int64_t i = 0; i < g.size(); ++i)
      ga.data[i] += g.data[i] * (va.data[i] > c ? 1.0 : 0.0);  // 0 at the kink
  });
}

Var Tape::log_clamped(Var a) {
  const Tensor& ta = value(a);
  Tensor out = ta;
  for (auto& v : out.data) {
    if (v < kLogClamp) {
      ++clamp_events_;
      v = std::log(kLogClamp);
    } else {
      v = std::log(v);
    }
  }
  check_finite(out, "log");
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    const Tensor& va = t.nodes_[static_cast<std::size_t>(ai)].value;
    Tensor& ga = t.grad_buffer(ai);
    for (std::int64_t i = 0; i < g.size(); ++i)
      if (va.data[i] >= kLogClamp) ga.data[i] += g.data[i] / va.data[i];
  });
}

Var Tape::sum(Var a) {
  const Tensor& ta = value(a);
  double s = 0.0;
  for (double v : ta.data) s += v;
  Tensor out = Tensor::scalar(s);
  check_finite(out, "sum");
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    double g = t.grads_[static_cast<std::size_t>(out_id)].data[0];
    Tensor& ga = t.grad_buffer(ai);
    for (auto& v : ga.data) v += g;
  });
}

Var Tape::mean(Var a) {
  const Tensor& ta = value(a);
  if (ta.size() == 0) throw ShapeError("mean of empty tensor");
  double s = 0.0;
  for (double v : ta.data) s += v;
  double inv_n = 1.0 / static_cast<double>(ta.size());
  Tensor out = Tensor::scalar(s / static_cast<double>(ta.size()));
  check_finite(out, "mean");
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai, inv_n](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    double g = t.grads_[static_cast<std::size_t>(out_id)].data[0] * inv_n;
    Tensor& ga = t.grad_buffer(ai);
    for (auto& v : ga.data) v += g;
  });
}

Var Tape::row_sum(Var a) {
  const Tensor& ta = value(a);
  Tensor out = Tensor::zeros(ta.rows, 1);
  for (std::int64_t i = 0; i < ta.rows; ++i) {
    double s = 0.0;
    for (std::int64_t j = 0; j < ta.cols; ++j) s += ta.at(i, j);
    out.data[static_cast<std::size_t>(i)] = s;
  }
  check_finite(out, "row_sum");
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    Tensor& ga = t.grad_buffer(ai);
    for (std::int64_t i = 0; i < ga.rows; ++i)
      for (std::int64_t j = 0; j < ga.cols; ++j) ga.at(i, j) += g.data[static_cast<std::size_t>(i)];
  });
}

Var Tape::row_slice(Var a, std::int64_t r0, std::int64_t n) {
  const Tensor& ta = value(a);
  if (r0 < 0 || n < 0 || r0 + n > ta.rows)
    throw ShapeError("row_slice: range [" + std::to_string(r0) + ", " + std::to_string(r0 + n) +
                     ") out of " + std::to_string(ta.rows) + " rows");
  Tensor out(n, ta.cols);
  std::copy(ta.data.begin() + r0 * ta.cols, ta.data.begin() + (r0 + n) * ta.cols, out.data.begin());
  bool ng = node(a).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id;
  return push(std::move(out), ng, [out_id, ai, r0](Tape& t) {
    if (!t.nodes_[static_cast<std::size_t>(ai)].needs_grad) return;
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    Tensor& ga = t.grad_buffer(ai);
    for (std::int64_t i = 0; i < g.size(); ++i)
      ga.data[static_cast<std::size_t>(r0 * ga.cols + i)] += g.data[static_cast<std::size_t>(i)];
  });
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.rows != tb.rows)
    throw ShapeError("concat_cols: row counts differ " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out(ta.rows, ta.cols + tb.cols);
  for (std::int64_t i = 0; i < ta.rows; ++i) {
    for (std::int64_t j = 0; j < ta.cols; ++j) out.at(i, j) = ta.at(i, j);
    for (std::int64_t j = 0; j < tb.cols; ++j) out.at(i, ta.cols + j) = tb.at(i, j);
  }
  bool ng = node(a).needs_grad || node(b).needs_grad;
  std::int32_t out_id = static_cast<std::int32_t>(nodes_.size());
  std::int32_t ai = a.id, bi = b.id;
  std::int64_t ca = ta.cols;
  return push(std::move(out), ng, [out_id, ai, bi, ca](Tape& t) {
    const Tensor& g = t.grads_[static_cast<std::size_t>(out_id)];
    if (t.nodes_[static_cast<std::size_t>(ai)].needs_grad) {
      Tensor& ga = t.grad_buffer(ai);
      for (std::int64_t i = 0; i < ga.rows; ++i)
        for (std::int64_t j = 0; j < ga.cols; ++j) ga.at(i, j) += g.at(i, j);
    }
    if (t.nodes_[static_cast<std::size_t>(bi)].needs_grad) {
      Tensor& gb = t.grad_buffer(bi);
      for (std::int64_t i = 0; i < gb.rows; ++i)
        for (std::int64_t j = 0; j < gb.cols; ++j) gb.at(i, j) += g.at(i, ca + j);
    }
  });
}

GradCheckReport grad_check(const std::function<double()>& forward,
                           const std::function<std::vector<Tensor>()>& gradients,
                           std::span<Tensor* const> params, double fd_step,
                           double denom_floor) {
  if (fd_step <= 0.0) throw Error("grad_check: fd_step must be positive");
  std::vector<Tensor> analytic = gradients();
  if (analytic.size() != params.size())
    throw ShapeError("grad_check: gradient count does not match parameter count");
  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& par = *params[p];
    if (!par.same_shape(analytic[p]))
      throw ShapeError("grad_check: gradient shape mismatch for parameter " + std::to_string(p));
    for (std::int64_t i = 0; i < par.size(); ++i) {
      double orig = par.data[static_cast<std::size_t>(i)];
      par.data[static_cast<std::size_t>(i)] = orig + fd_step;
      double f_plus = forward();
      par.data[static_cast<std::size_t>(i)] = orig - fd_step;
      double f_minus = forward();
      par.data[static_cast<std::size_t>(i)] = orig;
      double numeric = (f_plus - f_minus) / (2.0 * fd_step);
      double an = analytic[p].data[static_cast<std::size_t>(i)];
      double denom = std::max({std::fabs(numeric), std::fabs(an), denom_floor});
      double rel = std::fabs(numeric - an) / denom;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = p;
        report.worst_coord = i;
        report.analytic = an;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace vccgm
