#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vccgm/errors.hpp"
#include "vccgm/rng.hpp"

namespace vccgm {

// Dense row-major 2-D tensor of doubles. Scalars are 1x1, column vectors
// n x 1. Everything runs in 64-bit; desk scale makes speed irrelevant and
// gradient checks need the precision.
struct Tensor {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::int64_t r, std::int64_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

  static Tensor zeros(std::int64_t r, std::int64_t c) { return Tensor(r, c); }

  static Tensor full(std::int64_t r, std::int64_t c, double v) {
    Tensor t(r, c);
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }

  static Tensor scalar(double v) { return full(1, 1, v); }

  static Tensor column(std::span<const double> values) {
    Tensor t(static_cast<std::int64_t>(values.size()), 1);
    std::copy(values.begin(), values.end(), t.data.begin());
    return t;
  }

  static Tensor row(std::span<const double> values) {
    Tensor t(1, static_cast<std::int64_t>(values.size()));
    std::copy(values.begin(), values.end(), t.data.begin());
    return t;
  }

  static Tensor from_rows(std::int64_t r, std::int64_t c, std::span<const double> values) {
    if (static_cast<std::int64_t>(values.size()) != r * c)
      throw ShapeError("from_rows: value count does not match shape");
    Tensor t(r, c);
    std::copy(values.begin(), values.end(), t.data.begin());
    return t;
  }

  static Tensor randn(std::int64_t r, std::int64_t c, Rng& rng, double stddev = 1.0) {
    Tensor t(r, c);
    for (auto& v : t.data) v = rng.normal() * stddev;
    return t;
  }

  std::int64_t size() const { return rows * cols; }

  double& at(std::int64_t r, std::int64_t c) { return data[static_cast<std::size_t>(r * cols + c)]; }
  double at(std::int64_t r, std::int64_t c) const { return data[static_cast<std::size_t>(r * cols + c)]; }

  std::span<const double> row_span(std::int64_t r) const {
    return {data.data() + r * cols, static_cast<std::size_t>(cols)};
  }

  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  std::string shape_str() const {
    return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
  }
};

}  // namespace vccgm
