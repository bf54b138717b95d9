#include <doctest.h>

#include <cmath>

#include "vccgm/tape.hpp"

using namespace vccgm;

namespace {

// Small MLP loss used by the finite-difference checks:
// mean(square(tanh(x W1 + b1) W2 + b2)).
double mlp_loss_value(const Tensor& x, const Tensor& w1, const Tensor& b1, const Tensor& w2,
                      const Tensor& b2) {
  Tape t;
  Var h = t.tanh_act(t.add_bias(t.matmul(t.leaf(x), t.leaf(w1)), t.leaf(b1)));
  Var out = t.add_bias(t.matmul(h, t.leaf(w2)), t.leaf(b2));
  return t.value_scalar(t.mean(t.square(out)));
}

}  // namespace

TEST_CASE("forward primitives match closed forms") {
  Tape t;
  CHECK(t.value_scalar(t.sigmoid(t.constant(0.0))) == doctest::Approx(0.5));
  CHECK(t.value_scalar(t.softplus(t.constant(0.0))) == doctest::Approx(std::log(2.0)));
  CHECK(t.value_scalar(t.max_with(t.constant(-3.0), 0.0)) == 0.0);
  CHECK(t.value_scalar(t.relu(t.constant(-1.5))) == 0.0);
  CHECK(t.value_scalar(t.leaky_relu(t.constant(-2.0), 0.1)) == doctest::Approx(-0.2));
  CHECK(t.value_scalar(t.tanh_act(t.constant(0.0))) == 0.0);
  CHECK(t.value_scalar(t.abs(t.constant(-0.7))) == doctest::Approx(0.7));
  CHECK(t.value_scalar(t.square(t.constant(-3.0))) == doctest::Approx(9.0));
}

TEST_CASE("matmul and reductions") {
  Tape t;
  Tensor a = Tensor::from_rows(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  Tensor b = Tensor::from_rows(3, 2, std::vector<double>{7, 8, 9, 10, 11, 12});
  Var c = t.matmul(t.leaf(a), t.leaf(b));
  CHECK(t.value(c).at(0, 0) == doctest::Approx(58));
  CHECK(t.value(c).at(0, 1) == doctest::Approx(64));
  CHECK(t.value(c).at(1, 0) == doctest::Approx(139));
  CHECK(t.value(c).at(1, 1) == doctest::Approx(154));
  CHECK(t.value_scalar(t.sum(c)) == doctest::Approx(58 + 64 + 139 + 154));
  CHECK(t.value_scalar(t.mean(c)) == doctest::Approx((58 + 64 + 139 + 154) / 4.0));
  Var rs = t.row_sum(c);
  CHECK(t.value(rs).at(0, 0) == doctest::Approx(122));
  CHECK(t.value(rs).at(1, 0) == doctest::Approx(293));
}

TEST_CASE("shape mismatches raise ShapeError") {
  Tape t;
  Var a = t.leaf(Tensor::zeros(2, 3));
  Var b = t.leaf(Tensor::zeros(2, 2));
  CHECK_THROWS_AS(t.matmul(a, b), ShapeError);
  CHECK_THROWS_AS(t.add(a, b), ShapeError);
  CHECK_THROWS_AS(t.add_bias(a, t.leaf(Tensor::zeros(1, 2))), ShapeError);
  CHECK_THROWS_AS(t.row_slice(a, 1, 5), ShapeError);
}

TEST_CASE("non-finite forward output raises NumericalError") {
  Tape t;
  Var big = t.leaf(Tensor::full(1, 1, 1e308));
  CHECK_THROWS_AS(t.mul(big, big), NumericalError);
  Tensor bad = Tensor::scalar(std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(t.leaf(bad), NumericalError);
}

TEST_CASE("backward requires a scalar loss") {
  Tape t;
  Var a = t.leaf(Tensor::zeros(2, 2), true);
  CHECK_THROWS_AS(t.backward(a), ShapeError);
}

TEST_CASE("grad of sum of squares is 2W") {
  Tape t;
  Tensor w = Tensor::from_rows(2, 2, std::vector<double>{1.0, -2.0, 0.5, 3.0});
  Var wv = t.leaf(w, true);
  Var loss = t.sum(t.square(wv));
  t.backward(loss);
  const Tensor& g = t.grad(wv);
  for (std::int64_t i = 0; i < w.size(); ++i)
    CHECK(g.data[i] == doctest::Approx(2.0 * w.data[i]));
}

TEST_CASE("grad of sigmoid(w.x) at w=0 is x/4") {
  Tape t;
  Tensor x = Tensor::from_rows(3, 1, std::vector<double>{0.5, -1.0, 2.0});
  Var w = t.leaf(Tensor::zeros(1, 3), true);
  Var s = t.sigmoid(t.matmul(w, t.leaf(x)));  // 1x1
  t.backward(s);
  const Tensor& g = t.grad(w);
  for (int i = 0; i < 3; ++i)
    CHECK(g.data[i] == doctest::Approx(0.25 * x.data[i]).epsilon(1e-12));
}

TEST_CASE("fan-out accumulates gradients additively") {
  Tape t;
  Var a = t.leaf(Tensor::scalar(3.0), true);
  Var loss = t.add(t.square(a), t.scale(a, 5.0));  // a^2 + 5a -> grad 2a + 5
  t.backward(loss);
  CHECK(t.grad(a).data[0] == doctest::Approx(11.0));
}

TEST_CASE("row_slice and concat_cols round gradients correctly") {
  Tape t;
  Var a = t.leaf(Tensor::from_rows(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6}), true);
  Var top = t.row_slice(a, 0, 2);
  Var bottom = t.row_slice(a, 1, 2);  // overlapping on purpose
  Var joined = t.concat_cols(top, bottom);
  Var loss = t.sum(joined);
  t.backward(loss);
  const Tensor& g = t.grad(a);
  // row 0 appears once, rows 1 twice (top+bottom overlap), row 2 once
  CHECK(g.at(0, 0) == 1.0);
  CHECK(g.at(1, 0) == 2.0);
  CHECK(g.at(2, 0) == 1.0);
}

TEST_CASE("backward linearity") {
  Rng rng(7);
  Tensor w = Tensor::randn(3, 3, rng);
  auto grad_of = [&](double a, double b) {
    Tape t;
    Var wv = t.leaf(w, true);
    Var l1 = t.sum(t.square(wv));
    Var l2 = t.mean(t.sigmoid(wv));
    Var loss = t.add(t.scale(l1, a), t.scale(l2, b));
    t.backward(loss);
    return t.grad(wv);
  };
  Tensor g1 = grad_of(1.0, 0.0);
  Tensor g2 = grad_of(0.0, 1.0);
  Tensor gc = grad_of(2.5, -1.5);
  for (std::int64_t i = 0; i < w.size(); ++i)
    CHECK(std::fabs(gc.data[i] - (2.5 * g1.data[i] - 1.5 * g2.data[i])) < 1e-10);
}

TEST_CASE("deterministic forward/backward for fixed seed") {
  auto run = [] {
    Rng rng(42);
    Tensor x = Tensor::randn(4, 3, rng);
    Tensor w = Tensor::randn(3, 2, rng);
    Tape t;
    Var wv = t.leaf(w, true);
    Var loss = t.mean(t.square(t.matmul(t.leaf(x), wv)));
    t.backward(loss);
    return std::make_pair(t.value_scalar(loss), t.grad(wv));
  };
  auto [l1, g1] = run();
  auto [l2, g2] = run();
  CHECK(l1 == l2);
  for (std::int64_t i = 0; i < g1.size(); ++i) CHECK(g1.data[i] == g2.data[i]);
}

TEST_CASE("two-layer MLP gradients match central finite differences") {
  Rng rng(123);
  Tensor x = Tensor::randn(5, 4, rng);
  Tensor w1 = Tensor::randn(4, 6, rng, 0.5);
  Tensor b1 = Tensor::randn(1, 6, rng, 0.1);
  Tensor w2 = Tensor::randn(6, 2, rng, 0.5);
  Tensor b2 = Tensor::randn(1, 2, rng, 0.1);

  auto forward = [&] { return mlp_loss_value(x, w1, b1, w2, b2); };
  auto gradients = [&] {
    Tape t;
    Var w1v = t.leaf(w1, true), b1v = t.leaf(b1, true);
    Var w2v = t.leaf(w2, true), b2v = t.leaf(b2, true);
    Var h = t.tanh_act(t.add_bias(t.matmul(t.leaf(x), w1v), b1v));
    Var out = t.add_bias(t.matmul(h, w2v), b2v);
    t.backward(t.mean(t.square(out)));
    return std::vector<Tensor>{t.grad(w1v), t.grad(b1v), t.grad(w2v), t.grad(b2v)};
  };
  std::vector<Tensor*> params{&w1, &b1, &w2, &b2};
  GradCheckReport rep = grad_check(forward, gradients, params, 1e-3);
  CHECK(rep.max_rel_error < 1e-4);
}

TEST_CASE("log clamp counts events and zeroes the clamped gradient") {
  Tape t;
  Var a = t.leaf(Tensor::from_rows(2, 1, std::vector<double>{0.5, -1.0}), true);
  Var l = t.sum(t.log_clamped(a));
  CHECK(t.clamp_events() == 1);
  t.backward(l);
  CHECK(t.grad(a).data[0] == doctest::Approx(2.0));
  CHECK(t.grad(a).data[1] == 0.0);
}
