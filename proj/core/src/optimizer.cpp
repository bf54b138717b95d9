#include "vccgm/optimizer.hpp"

#include <cmath>

#include "vccgm/errors.hpp"

namespace vccgm {

Optimizer::Kind Optimizer::parse(const std::string& name) {
  if (name == "momentum" || name == "sgd") return Kind::momentum;
  if (name == "adam") return Kind::adam;
  throw InvalidSpec("unknown optimizer '" + name + "'");
}

void Optimizer::step(ParamStore& params, const std::map<std::string, Tensor>& grads) {
  if (kind_ == Kind::momentum) {
    for (auto& [name, p] : params.arrays) {
      auto git = grads.find(name);
      if (git == grads.end()) continue;
      const Tensor& g = git->second;
      if (!p.same_shape(g)) throw ShapeError("optimizer: gradient shape mismatch for " + name);
      if (!vel_.has(name)) vel_.add(name, Tensor::zeros(p.rows, p.cols));
      Tensor& v = vel_.at(name);
      for (std::int64_t i = 0; i < p.size(); ++i) {
        auto idx = static_cast<std::size_t>(i);
        v.data[idx] = momentum_ * v.data[idx] - lr_ * g.data[idx];
        p.data[idx] += v.data[idx];
      }
    }
    return;
  }

  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (auto& [name, p] : params.arrays) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const Tensor& g = git->second;
    if (!p.same_shape(g)) throw ShapeError("optimizer: gradient shape mismatch for " + name);
    if (!m_.has(name)) {
      m_.add(name, Tensor::zeros(p.rows, p.cols));
      v_.add(name, Tensor::zeros(p.rows, p.cols));
    }
    Tensor& m = m_.at(name);
    Tensor& v = v_.at(name);
    for (std::int64_t i = 0; i < p.size(); ++i) {
      auto idx = static_cast<std::size_t>(i);
      m.data[idx] = beta1_ * m.data[idx] + (1.0 - beta1_) * g.data[idx];
      v.data[idx] = beta2_ * v.data[idx] + (1.0 - beta2_) * g.data[idx] * g.data[idx];
      double mh = m.data[idx] / bc1;
      double vh = v.data[idx] / bc2;
      p.data[idx] -= lr_ * mh / (std::sqrt(vh) + eps_);
    }
  }
}

void spectral_clip(ParamStore& params, ParamStore& power, double limit) {
  for (auto& [name, w] : params.arrays) {
    if (w.rows < 2 || w.cols < 2) continue;
    if (!power.has(name)) power.add(name, Tensor::full(w.cols, 1, 1.0 / std::sqrt(static_cast<double>(w.cols))));
    Tensor& u = power.at(name);

    // v = normalize(W u); u = normalize(W^T v); sigma ~= v^T W u
    Tensor v(w.rows, 1);
    for (std::int64_t i = 0; i < w.rows; ++i) {
      double acc = 0.0;
      for (std::int64_t j = 0; j < w.cols; ++j) acc += w.at(i, j) * u.data[static_cast<std::size_t>(j)];
      v.data[static_cast<std::size_t>(i)] = acc;
    }
    double vn = 0.0;
    for (double x : v.data) vn += x * x;
    vn = std::sqrt(vn) + 1e-12;
    for (double& x : v.data) x /= vn;

    for (std::int64_t j = 0; j < w.cols; ++j) {
      double acc = 0.0;
      for (std::int64_t i = 0; i < w.rows; ++i) acc += w.at(i, j) * v.data[static_cast<std::size_t>(i)];
      u.data[static_cast<std::size_t>(j)] = acc;
    }
    double un = 0.0;
    for (double x : u.data) un += x * x;
    un = std::sqrt(un) + 1e-12;
    for (double& x : u.data) x /= un;

    double sigma = 0.0;
    for (std::int64_t i = 0; i < w.rows; ++i) {
      double acc = 0.0;
      for (std::int64_t j = 0; j < w.cols; ++j) acc += w.at(i, j) * u.data[static_cast<std::size_t>(j)];
      sigma += v.data[static_cast<std::size_t>(i)] * acc;
    }
    sigma = std::fabs(sigma);
    if (sigma > limit && sigma > 0.0) {
      double s = limit / sigma;
      for (double& x : w.data) x *= s;
    }
  }
}

}  // namespace vccgm
