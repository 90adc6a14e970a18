#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "se2conv/autograd.hpp"
#include "se2conv/rng.hpp"

using namespace se2conv;

namespace {

template <typename T>
Tensor<T> make(std::vector<std::size_t> shape, std::vector<T> vals) {
  Tensor<T> t(std::move(shape));
  REQUIRE(t.size() == vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) t[i] = vals[i];
  return t;
}

TensorD randn(Rng& rng, std::vector<std::size_t> shape) {
  TensorD t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.gaussian();
  return t;
}

// Central-difference check of d(loss)/d(leaf) for a builder that reconstructs
// the graph from scratch.
template <typename Build>
double fd_check(const TensorD& leaf, Build build) {
  Tape<double> tape;
  Var<double> v = tape.parameter(leaf);
  Var<double> loss = build(tape, v);
  tape.backward(loss.id);
  TensorD analytic = tape.grad(v.id);
  TensorD fd = finite_difference_gradient<double>(
      [&](const TensorD& x) {
        Tape<double> t2;
        Var<double> v2 = t2.parameter(x);
        return build(t2, v2).value()[0];
      },
      leaf, 1e-5);
  double worst = 0;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    double scale = std::max(std::abs(fd[i]), std::abs(analytic[i]));
    if (scale < 1e-8) continue;
    worst = std::max(worst, std::abs(fd[i] - analytic[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("valid correlation of the 3x3 ramp with a diagonal kernel") {
  Tape<float> tape;
  Var<float> img = tape.input(make<float>({3, 3, 1}, {1, 2, 3, 4, 5, 6, 7, 8, 9}));
  Var<float> ker = tape.input(make<float>({2, 2, 1, 1}, {1, 0, 0, 1}));
  Var<float> out = correlate2d(img, ker, Padding::Valid, 1);
  REQUIRE(out.value().shape() == std::vector<std::size_t>{2, 2, 1});
  CHECK(out.value()[0] == 6.0f);
  CHECK(out.value()[1] == 8.0f);
  CHECK(out.value()[2] == 12.0f);
  CHECK(out.value()[3] == 14.0f);
}

TEST_CASE("correlation accepts batched rank-4 input") {
  Tape<float> tape;
  TensorF img({2, 3, 3, 1});
  for (std::size_t i = 0; i < 9; ++i) {
    img[i] = float(i + 1);
    img[9 + i] = 2.0f * float(i + 1);
  }
  Var<float> x = tape.input(img);
  Var<float> ker = tape.input(make<float>({2, 2, 1, 1}, {1, 0, 0, 1}));
  Var<float> out = correlate2d(x, ker, Padding::Valid, 1);
  REQUIRE(out.value().shape() == std::vector<std::size_t>{2, 2, 2, 1});
  CHECK(out.value()[0] == 6.0f);
  CHECK(out.value()[4] == 12.0f);  // second item doubled
}

TEST_CASE("same-padding correlation matches the naive zero-padded oracle") {
  Rng rng(11);
  TensorD img = randn(rng, {5, 6, 2});
  TensorD ker = randn(rng, {3, 3, 2, 4});
  Tape<double> tape;
  Var<double> out = correlate2d(tape.input(img), tape.input(ker), Padding::SameZero, 1);
  TensorD ref = oracle::correlate2d_same(img, ker);
  REQUIRE(out.value().shape() == ref.shape());
  CHECK(oracle::max_abs_diff(out.value(), ref) < 1e-12);
}

TEST_CASE("strided valid correlation subsamples the full output") {
  Rng rng(12);
  TensorD img = randn(rng, {7, 7, 1});
  TensorD ker = randn(rng, {3, 3, 1, 1});
  Tape<double> tape;
  Var<double> s2 = correlate2d(tape.input(img), tape.input(ker), Padding::Valid, 2);
  Var<double> s1 = correlate2d(tape.input(img), tape.input(ker), Padding::Valid, 1);
  REQUIRE(s2.value().shape() == std::vector<std::size_t>{3, 3, 1});
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(s2.value()[(r * 3 + c)] == doctest::Approx(s1.value()[(2 * r * 5 + 2 * c)]));
}

TEST_CASE("max pool of the 2x2 example and tie-breaking to the lowest index") {
  Tape<float> tape;
  Var<float> x = tape.parameter(make<float>({2, 2}, {1, 2, 3, 4}));
  Var<float> p = max_pool2d(x, 2);
  REQUIRE(p.value().size() == 1);
  CHECK(p.value()[0] == 4.0f);

  Var<float> loss = sum(p);
  tape.backward(loss.id);
  TensorF g = tape.grad(x.id);
  CHECK(g[0] == 0.0f);
  CHECK(g[3] == 1.0f);

  Tape<float> tape2;
  Var<float> ties = tape2.parameter(make<float>({2, 2}, {7, 7, 7, 7}));
  Var<float> p2 = max_pool2d(ties, 2);
  tape2.backward(sum(p2).id);
  TensorF g2 = tape2.grad(ties.id);
  CHECK(g2[0] == 1.0f);  // lowest linear index wins the tie
  CHECK(g2[1] == 0.0f);
  CHECK(g2[2] == 0.0f);
  CHECK(g2[3] == 0.0f);
}

TEST_CASE("max pool rejects non-divisible sizes") {
  Tape<float> tape;
  Var<float> x = tape.input(make<float>({3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9}));
  CHECK_THROWS(max_pool2d(x, 2));
}

TEST_CASE("relu clamps negatives and zero") {
  Tape<float> tape;
  Var<float> x = tape.parameter(make<float>({3}, {-1, 0, 2}));
  Var<float> y = relu(x);
  CHECK(y.value()[0] == 0.0f);
  CHECK(y.value()[1] == 0.0f);
  CHECK(y.value()[2] == 2.0f);
  tape.backward(sum(y).id);
  TensorF g = tape.grad(x.id);
  CHECK(g[0] == 0.0f);
  CHECK(g[1] == 0.0f);  // derivative at the kink is taken as 0
  CHECK(g[2] == 1.0f);
}

TEST_CASE("logistic loss closed-form values") {
  {
    Tape<double> tape;
    Var<double> z = tape.input(make<double>({2, 1}, {0, 0}));
    TensorD y = make<double>({2, 1}, {0, 1});
    Var<double> l = logistic_loss(z, y);
    CHECK(l.value()[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  {
    Tape<double> tape;
    Var<double> z = tape.input(make<double>({1, 1}, {1}));
    TensorD y = make<double>({1, 1}, {1});
    Var<double> l = logistic_loss(z, y);
    CHECK(l.value()[0] == doctest::Approx(std::log1p(std::exp(-1.0))).epsilon(1e-12));
    CHECK(l.value()[0] == doctest::Approx(0.31326).epsilon(1e-4));
  }
}

TEST_CASE("logistic loss is stable, nonnegative, and rejects soft labels") {
  Tape<double> tape;
  Var<double> z = tape.input(make<double>({3, 1}, {-1000, 0, 1000}));
  TensorD y = make<double>({3, 1}, {0, 1, 1});
  Var<double> l = logistic_loss(z, y);
  CHECK(std::isfinite(l.value()[0]));
  CHECK(l.value()[0] >= 0.0);

  TensorD bad = make<double>({3, 1}, {0, 0.5, 1});
  CHECK_THROWS(logistic_loss(z, bad));
}

TEST_CASE("logistic loss gradient is mean sigmoid error") {
  Rng rng(3);
  TensorD z = randn(rng, {5, 1});
  TensorD y = make<double>({5, 1}, {1, 0, 1, 1, 0});
  Tape<double> tape;
  Var<double> zv = tape.parameter(z);
  tape.backward(logistic_loss(zv, y).id);
  TensorD g = tape.grad(zv.id);
  for (std::size_t i = 0; i < 5; ++i) {
    double sig = 1.0 / (1.0 + std::exp(-z[i]));
    CHECK(g[i] == doctest::Approx((sig - y[i]) / 5.0).epsilon(1e-12));
  }
}

TEST_CASE("sgd momentum hand-iterated two steps") {
  TensorD p = make<double>({1}, {0});
  TensorD v = make<double>({1}, {0});
  TensorD g = make<double>({1}, {1});
  sgd_momentum_step(p, v, g, 0.1, 0.9);
  CHECK(p[0] == doctest::Approx(-0.1).epsilon(1e-15));
  sgd_momentum_step(p, v, g, 0.1, 0.9);
  CHECK(p[0] == doctest::Approx(-0.29).epsilon(1e-15));
}

TEST_CASE("backward flags parameters that do not reach the loss") {
  Tape<double> tape;
  Var<double> used = tape.parameter(make<double>({2}, {1, 2}));
  Var<double> orphan = tape.parameter(make<double>({2}, {3, 4}));
  Var<double> loss = mean(mul(used, used));
  std::vector<int> dropped = tape.backward(loss.id);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0] == orphan.id);
  TensorD g = tape.grad(orphan.id);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(tape.grad(used.id)[0] == doctest::Approx(1.0));
}

TEST_CASE("non-finite values are rejected at every node") {
  Tape<double> tape;
  TensorD bad({2});
  bad[0] = 1.0;
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(tape.input(bad));

  Tape<double> tape2;
  Var<double> big = tape2.input(make<double>({1}, {1e308}));
  CHECK_THROWS(mul(big, big));  // overflow to inf caught on push
}

TEST_CASE("batch norm train mode normalizes and constant channels pass through shift") {
  Rng rng(4);
  TensorD x = randn(rng, {8, 3, 3, 2});
  for (std::size_t i = 0; i < x.size(); i += 2) x[i] = 5.0;  // channel 0 constant
  Tape<double> tape;
  Var<double> xv = tape.input(x);
  Var<double> scale = tape.input(make<double>({2}, {1.5, 2.0}));
  Var<double> shift = tape.input(make<double>({2}, {0.25, -1.0}));
  BatchNormState<double> state;
  state.running_mean = TensorD({2});
  state.running_var = TensorD({2});
  state.running_var.fill(1.0);
  Var<double> y = batch_norm(xv, scale, shift, &state, 1e-5, BnMode::Train, true);

  double rows = double(x.size() / 2);
  double mean1 = 0, var1 = 0;
  for (std::size_t i = 1; i < x.size(); i += 2) mean1 += x[i];
  mean1 /= rows;
  for (std::size_t i = 1; i < x.size(); i += 2) var1 += (x[i] - mean1) * (x[i] - mean1);
  var1 /= rows;  // biased

  // Constant channel: xhat = 0 exactly, output = shift.
  for (std::size_t i = 0; i < y.value().size(); i += 2)
    CHECK(y.value()[i] == doctest::Approx(0.25).epsilon(1e-12));
  // Varying channel: matches the hand-computed normalization.
  for (std::size_t i = 1; i < 9; i += 2) {
    double expect = 1.5 * 0 + 0;  // placeholder, recomputed below
    expect = 2.0 * (x[i] - mean1) / std::sqrt(var1 + 1e-5) - 1.0;
    CHECK(y.value()[i] == doctest::Approx(expect).epsilon(1e-10));
  }
  // EMA update with factor 0.1 from (0, 1) initial state.
  CHECK(state.running_mean[1] == doctest::Approx(0.1 * mean1).epsilon(1e-12));
  CHECK(state.running_var[1] == doctest::Approx(0.9 * 1.0 + 0.1 * var1).epsilon(1e-12));
}

TEST_CASE("batch norm inference mode is the affine map given by running stats") {
  BatchNormState<double> state;
  state.running_mean = make<double>({1}, {2.0});
  state.running_var = make<double>({1}, {4.0});
  Tape<double> tape;
  Var<double> x = tape.input(make<double>({2, 1, 1, 1}, {2.0, 6.0}));
  Var<double> scale = tape.input(make<double>({1}, {3.0}));
  Var<double> shift = tape.input(make<double>({1}, {1.0}));
  Var<double> y = batch_norm(x, scale, shift, &state, 1e-5, BnMode::Inference, false);
  CHECK(y.value()[0] == doctest::Approx(1.0).epsilon(1e-5));            // (2-2)/2*3+1
  CHECK(y.value()[1] == doctest::Approx(3.0 * 4.0 / 2.0 + 1.0).epsilon(1e-5));
  // Inference must not touch the stored statistics.
  CHECK(state.running_mean[0] == 2.0);
  CHECK(state.running_var[0] == 4.0);
}

TEST_CASE("global spatial max reduces [B,H,W,C] to [B,C]") {
  Tape<float> tape;
  TensorF x({1, 2, 2, 2});
  float vals[8] = {1, -9, 3, 2, 0, 5, -1, 4};
  for (int i = 0; i < 8; ++i) x[std::size_t(i)] = vals[i];
  Var<float> y = global_spatial_max(tape.parameter(x));
  REQUIRE(y.value().shape() == std::vector<std::size_t>{1, 2});
  CHECK(y.value()[0] == 3.0f);
  CHECK(y.value()[1] == 5.0f);
}

TEST_CASE("add_channel_bias broadcasts over trailing axis") {
  Tape<float> tape;
  Var<float> x = tape.input(make<float>({2, 1, 1, 2}, {1, 2, 3, 4}));
  Var<float> b = tape.input(make<float>({2}, {10, 20}));
  Var<float> y = add_channel_bias(x, b);
  CHECK(y.value()[0] == 11.0f);
  CHECK(y.value()[1] == 22.0f);
  CHECK(y.value()[2] == 13.0f);
  CHECK(y.value()[3] == 24.0f);
}

TEST_CASE("finite differences agree with the tape on composite graphs") {
  Rng rng(21);
  TensorD x = randn(rng, {3, 4});

  CHECK(fd_check(x, [](Tape<double>&, Var<double> v) {
          return mean(mul(v, v));
        }) < 1e-7);

  CHECK(fd_check(x, [](Tape<double>&, Var<double> v) {
          return sum(scale(reshape(v, {12}), 0.37));
        }) < 1e-7);

  TensorD img = randn(rng, {4, 4, 2});
  CHECK(fd_check(img, [&](Tape<double>& t, Var<double> v) {
          Var<double> k = t.input(make<double>({3, 3, 2, 1}, {0.1, -0.2, 0.3, 0.4, -0.5, 0.6,
                                                              0.7, -0.8, 0.9, 1.0, 0.1, -0.1,
                                                              0.2, 0.3, -0.3, 0.5, 0.4, 0.6}));
          return sum(correlate2d(v, k, Padding::SameZero, 1));
        }) < 1e-7);
}

TEST_CASE("backward requires a scalar loss") {
  Tape<double> tape;
  Var<double> x = tape.parameter(make<double>({2}, {1, 2}));
  CHECK_THROWS(tape.backward(x.id));
}
