#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dml/tensor.hpp"

using dml::Tape;
using dml::Tensor;

namespace {

using Builder = std::function<Tensor(Tape&, const Tensor&)>;
using Sampler = std::function<std::vector<double>(std::mt19937&)>;

// Reduce an op's output to a scalar through fixed non-uniform weights so every
// output element contributes a distinct coefficient to the loss.
Tensor weighted_loss(const Tensor& y) {
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.11 * static_cast<double>((i * 7) % 13);
  Tensor wt;
  wt.shape = y.shape;
  wt.values = std::move(w);
  return dml::reduce_sum(dml::mul(y, wt));
}

double loss_at(const Builder& build, const std::vector<std::size_t>& shape,
               const std::vector<double>& x) {
  Tape tape;
  Tensor in;
  in.shape = shape;
  in.values = x;
  Tensor v = tape.variable(in, "x");
  return weighted_loss(build(tape, v)).item();
}

// Central-difference gradient check: h = 1e-5, mixed tolerance
// |ad - fd| <= 1e-4*|fd| + 1e-6. Samplers keep inputs away from kinks.
void check_gradients(const std::string& tag, const Builder& build,
                     std::vector<std::size_t> shape, const Sampler& sample, int points = 100) {
  std::mt19937 rng(12345);
  const double h = 1e-5;
  for (int p = 0; p < points; ++p) {
    std::vector<double> x = sample(rng);
    Tape tape;
    Tensor in;
    in.shape = shape;
    in.values = x;
    Tensor v = tape.variable(in, "x");
    Tensor loss = weighted_loss(build(tape, v));
    tape.backward(loss);
    std::vector<double> ad = tape.grad(v);
    REQUIRE(ad.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::vector<double> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (loss_at(build, shape, xp) - loss_at(build, shape, xm)) / (2 * h);
      INFO(tag << ": point " << p << ", element " << i << ", fd=" << fd << ", ad=" << ad[i]);
      CHECK(std::abs(ad[i] - fd) <= 1e-4 * std::abs(fd) + 1e-6);
    }
  }
}

Sampler uniform_in(double lo, double hi, std::size_t n) {
  return [=](std::mt19937& rng) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    return x;
  };
}

// Uniform over [-hi,-lo] U [lo,hi]: keeps |x| >= lo (away from relu/abs kinks).
Sampler away_from_zero(double lo, double hi, std::size_t n) {
  return [=](std::mt19937& rng) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> x(n);
    for (auto& v : x) v = (sign(rng) ? 1.0 : -1.0) * d(rng);
    return x;
  };
}

// All pairwise gaps > 0.05 so min/max winners are stable under perturbation.
Sampler distinct_values(double lo, double hi, std::size_t n) {
  return [=](std::mt19937& rng) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> x(n);
    while (true) {
      for (auto& v : x) v = d(rng);
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (std::abs(x[i] - x[j]) <= 0.05) {
            ok = false;
            break;
          }
      if (ok) return x;
    }
  };
}

// Keeps every element at least 0.05 away from the clamp limit.
Sampler away_from_level(double level, std::size_t n) {
  return [=](std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 2.0);
    std::vector<double> x(n);
    for (auto& v : x) {
      do {
        v = d(rng);
      } while (std::abs(v - level) <= 0.05);
    }
    return x;
  };
}

Tensor const_matrix(std::size_t r, std::size_t c, std::vector<double> v) {
  return Tensor::matrix(r, c, std::move(v));
}

}  // namespace

TEST_CASE("forward values match hand-computed references") {
  CHECK(dml::sigmoid(Tensor::scalar(2.5)).item() == Catch::Approx(0.924142).margin(1e-6));
  CHECK(dml::tanh_op(Tensor::scalar(0.5)).item() == Catch::Approx(std::tanh(0.5)).margin(1e-12));
  CHECK(dml::relu(Tensor::scalar(-1.0)).item() == 0.0);
  CHECK(dml::relu(Tensor::scalar(0.3)).item() == Catch::Approx(0.3));
  CHECK(dml::clamp_max(Tensor::scalar(1.7), 1.0).item() == 1.0);
  CHECK(dml::clamp_max(Tensor::scalar(0.7), 1.0).item() == Catch::Approx(0.7));
  CHECK(dml::abs_op(Tensor::scalar(-2.5)).item() == Catch::Approx(2.5));

  Tensor sm = dml::softmax(Tensor::vector({1.0, 2.0}));
  CHECK(sm.values[0] == Catch::Approx(0.268941).margin(1e-6));
  CHECK(sm.values[1] == Catch::Approx(0.731059).margin(1e-6));

  Tensor mm = dml::matmul(const_matrix(2, 2, {1, 2, 3, 4}), const_matrix(2, 1, {1, 1}));
  REQUIRE(mm.shape == std::vector<std::size_t>{2, 1});
  CHECK(mm.values[0] == Catch::Approx(3.0));
  CHECK(mm.values[1] == Catch::Approx(7.0));

  Tensor mv = dml::matmul(const_matrix(2, 2, {1, 2, 3, 4}), Tensor::vector({1.0, 1.0}));
  REQUIRE(mv.shape == std::vector<std::size_t>{2});
  CHECK(mv.values[0] == Catch::Approx(3.0));
  CHECK(mv.values[1] == Catch::Approx(7.0));

  Tensor m = const_matrix(2, 3, {1, 5, 3, 4, 2, 6});
  CHECK(dml::reduce_min(m).item() == 1.0);
  CHECK(dml::reduce_max(m).item() == 6.0);
  CHECK(dml::reduce_sum(m).item() == Catch::Approx(21.0));
  CHECK(dml::reduce_mean(m).item() == Catch::Approx(3.5));
  CHECK(dml::reduce_min(m, 0).values == std::vector<double>{1, 2, 3});
  CHECK(dml::reduce_max(m, 1).values == std::vector<double>{5, 6});
  CHECK(dml::reduce_sum(m, 0).values == std::vector<double>{5, 7, 9});
  CHECK(dml::reduce_mean(m, 1).values == std::vector<double>{3, 4});

  Tensor pc = dml::pair_concat(const_matrix(2, 2, {1, 2, 3, 4}));
  REQUIRE(pc.shape == std::vector<std::size_t>{4, 4});
  CHECK(pc.values == std::vector<double>{1, 2, 1, 2, 1, 2, 3, 4, 3, 4, 1, 2, 3, 4, 3, 4});

  // Row-broadcast via ones-matmul: each output row equals the broadcast vector.
  Tensor rows = dml::matmul(const_matrix(3, 1, {1, 1, 1}), const_matrix(1, 2, {0.3, 0.8}));
  CHECK(rows.values == std::vector<double>{0.3, 0.8, 0.3, 0.8, 0.3, 0.8});
}

TEST_CASE("elementwise gradients match central differences") {
  const Tensor c = Tensor::vector({0.7, -0.4, 1.3, 0.9});
  check_gradients("add", [&](Tape&, const Tensor& x) { return dml::add(x, c); }, {4},
                  uniform_in(-2, 2, 4));
  check_gradients("sub-left", [&](Tape&, const Tensor& x) { return dml::sub(x, c); }, {4},
                  uniform_in(-2, 2, 4));
  check_gradients("sub-right", [&](Tape&, const Tensor& x) { return dml::sub(c, x); }, {4},
                  uniform_in(-2, 2, 4));
  check_gradients("mul", [&](Tape&, const Tensor& x) { return dml::mul(x, c); }, {4},
                  uniform_in(-2, 2, 4));
  check_gradients("div-num", [&](Tape&, const Tensor& x) { return dml::divide(x, c); }, {4},
                  uniform_in(-2, 2, 4));
  check_gradients("div-den", [&](Tape&, const Tensor& x) { return dml::divide(c, x); }, {4},
                  away_from_zero(0.2, 2.0, 4));
  check_gradients("relu", [](Tape&, const Tensor& x) { return dml::relu(x); }, {4},
                  away_from_zero(0.05, 2.0, 4));
  check_gradients("sigmoid", [](Tape&, const Tensor& x) { return dml::sigmoid(x); }, {4},
                  uniform_in(-4, 4, 4));
  check_gradients("tanh", [](Tape&, const Tensor& x) { return dml::tanh_op(x); }, {4},
                  uniform_in(-3, 3, 4));
  check_gradients("log", [](Tape&, const Tensor& x) { return dml::log_op(x); }, {4},
                  uniform_in(0.1, 3.0, 4));
  check_gradients("exp", [](Tape&, const Tensor& x) { return dml::exp_op(x); }, {4},
                  uniform_in(-2, 2, 4));
  check_gradients("abs", [](Tape&, const Tensor& x) { return dml::abs_op(x); }, {4},
                  away_from_zero(0.05, 2.0, 4));
  check_gradients("clamp_max", [](Tape&, const Tensor& x) { return dml::clamp_max(x, 1.0); }, {4},
                  away_from_level(1.0, 4));
}

TEST_CASE("reduction gradients match central differences") {
  check_gradients("min-all", [](Tape&, const Tensor& x) { return dml::reduce_min(x); }, {2, 3},
                  distinct_values(-1, 1, 6));
  check_gradients("max-all", [](Tape&, const Tensor& x) { return dml::reduce_max(x); }, {2, 3},
                  distinct_values(-1, 1, 6));
  check_gradients("min-axis0", [](Tape&, const Tensor& x) { return dml::reduce_min(x, 0); }, {2, 3},
                  distinct_values(-1, 1, 6));
  check_gradients("min-axis1", [](Tape&, const Tensor& x) { return dml::reduce_min(x, 1); }, {2, 3},
                  distinct_values(-1, 1, 6));
  check_gradients("max-axis0", [](Tape&, const Tensor& x) { return dml::reduce_max(x, 0); }, {2, 3},
                  distinct_values(-1, 1, 6));
  check_gradients("max-axis1", [](Tape&, const Tensor& x) { return dml::reduce_max(x, 1); }, {2, 3},
                  distinct_values(-1, 1, 6));
  check_gradients("sum-all", [](Tape&, const Tensor& x) { return dml::reduce_sum(x); }, {2, 3},
                  uniform_in(-2, 2, 6));
  check_gradients("sum-axis0", [](Tape&, const Tensor& x) { return dml::reduce_sum(x, 0); }, {2, 3},
                  uniform_in(-2, 2, 6));
  check_gradients("mean-all", [](Tape&, const Tensor& x) { return dml::reduce_mean(x); }, {2, 3},
                  uniform_in(-2, 2, 6));
  check_gradients("mean-axis1", [](Tape&, const Tensor& x) { return dml::reduce_mean(x, 1); }, {2, 3},
                  uniform_in(-2, 2, 6));
}

TEST_CASE("matmul, softmax, reshape, pair_concat gradients match central differences") {
  const Tensor B = const_matrix(3, 2, {0.4, -0.7, 1.1, 0.2, -0.5, 0.9});
  const Tensor A = const_matrix(2, 3, {0.3, 0.8, -0.2, 1.4, -0.6, 0.5});
  check_gradients("matmul-left", [&](Tape&, const Tensor& x) { return dml::matmul(x, B); }, {2, 3},
                  uniform_in(-2, 2, 6));
  check_gradients("matmul-right", [&](Tape&, const Tensor& x) { return dml::matmul(A, x); }, {3, 2},
                  uniform_in(-2, 2, 6));
  check_gradients("matmul-vec", [&](Tape&, const Tensor& x) { return dml::matmul(A, x); }, {3},
                  uniform_in(-2, 2, 3));
  check_gradients("softmax", [](Tape&, const Tensor& x) { return dml::softmax(x); }, {4},
                  uniform_in(-3, 3, 4));
  check_gradients("reshape",
                  [](Tape&, const Tensor& x) { return dml::reshape(x, {3, 2}); }, {2, 3},
                  uniform_in(-2, 2, 6));
  check_gradients("pair_concat", [](Tape&, const Tensor& x) { return dml::pair_concat(x); }, {3, 2},
                  uniform_in(-2, 2, 6));
  check_gradients("ones-row-broadcast",
                  [](Tape&, const Tensor& x) {
                    return dml::matmul(const_matrix(3, 1, {1, 1, 1}), x);
                  },
                  {1, 2}, uniform_in(-2, 2, 2));
  // Composite graph: smooth everywhere, exercises chained backward closures.
  check_gradients("composite",
                  [&](Tape&, const Tensor& x) {
                    return dml::reduce_mean(dml::sigmoid(dml::matmul(x, B)), 1);
                  },
                  {2, 3}, uniform_in(-2, 2, 6), 20);
}

TEST_CASE("subgradient conventions at kinks") {
  SECTION("relu'(0) = 0") {
    Tape tape;
    Tensor x = tape.variable(Tensor::vector({0.0, -0.0, 2.0}));
    tape.backward(dml::reduce_sum(dml::relu(x)));
    CHECK(tape.grad(x) == std::vector<double>{0, 0, 1});
  }
  SECTION("clamp_max gradient is 0 at the boundary and above") {
    Tape tape;
    Tensor x = tape.variable(Tensor::vector({1.0, 1.5, 0.4}));
    tape.backward(dml::reduce_sum(dml::clamp_max(x, 1.0)));
    CHECK(tape.grad(x) == std::vector<double>{0, 0, 1});
  }
  SECTION("abs'(0) = 0") {
    Tape tape;
    Tensor x = tape.variable(Tensor::vector({0.0, -0.7, 0.7}));
    tape.backward(dml::reduce_sum(dml::abs_op(x)));
    CHECK(tape.grad(x) == std::vector<double>{0, -1, 1});
  }
  SECTION("min/max ties route gradient to the lowest index") {
    {
      Tape tape;
      Tensor x = tape.variable(Tensor::vector({0.5, 0.3, 0.3}));
      tape.backward(dml::reduce_min(x));
      CHECK(tape.grad(x) == std::vector<double>{0, 1, 0});
    }
    {
      Tape tape;
      Tensor x = tape.variable(Tensor::vector({0.2, 0.7, 0.7}));
      tape.backward(dml::reduce_max(x));
      CHECK(tape.grad(x) == std::vector<double>{0, 1, 0});
    }
    {
      Tape tape;
      Tensor x = tape.variable(Tensor::matrix(2, 2, {0.0, 0.0, 0.0, 0.0}));
      tape.backward(dml::reduce_sum(dml::reduce_min(x, 0)));
      // Each column's winner is its first row.
      CHECK(tape.grad(x) == std::vector<double>{1, 1, 0, 0});
    }
  }
}

TEST_CASE("gradient accumulation and graph bookkeeping") {
  SECTION("shared subexpressions accumulate: d(x*x + x)/dx = 2x + 1") {
    Tape tape;
    Tensor x = tape.variable(Tensor::scalar(1.7));
    Tensor loss = dml::add(dml::mul(x, x), x);
    tape.backward(loss);
    CHECK(tape.grad(x)[0] == Catch::Approx(2 * 1.7 + 1).margin(1e-12));
  }
  SECTION("gradient is linear over branches") {
    Tape tape;
    Tensor x = tape.variable(Tensor::vector({0.4, 1.2}));
    Tensor loss = dml::add(dml::reduce_sum(dml::mul(x, Tensor::vector({2.0, 3.0}))),
                           dml::reduce_sum(dml::mul(x, Tensor::vector({-1.0, 5.0}))));
    tape.backward(loss);
    CHECK(tape.grad(x)[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(tape.grad(x)[1] == Catch::Approx(8.0).margin(1e-12));
  }
  SECTION("variables off the loss path get zero gradients") {
    Tape tape;
    Tensor x = tape.variable(Tensor::scalar(1.0));
    Tensor z = tape.variable(Tensor::vector({3.0, 4.0}));
    Tensor unused = dml::sigmoid(z);
    tape.backward(dml::mul(x, x));
    CHECK(tape.grad(z) == std::vector<double>{0, 0});
    CHECK(unused.tracked());
  }
  SECTION("scalar broadcast accumulates over all positions") {
    Tape tape;
    Tensor s = tape.variable(Tensor::scalar(0.5));
    Tensor m = Tensor::matrix(2, 2, {1, 2, 3, 4});
    tape.backward(dml::reduce_sum(dml::mul(s, m)));
    CHECK(tape.grad(s)[0] == Catch::Approx(10.0).margin(1e-12));
  }
  SECTION("broadcast works with the scalar on either side") {
    Tensor a = dml::add(Tensor::scalar(1.0), Tensor::vector({1, 2}));
    Tensor b = dml::add(Tensor::vector({1, 2}), Tensor::scalar(1.0));
    CHECK(a.values == std::vector<double>{2, 3});
    CHECK(b.values == std::vector<double>{2, 3});
    CHECK(a.shape == std::vector<std::size_t>{2});
  }
}

TEST_CASE("domain and usage errors") {
  Tensor a = Tensor::vector({1, 2});
  Tensor b = Tensor::vector({1, 2, 3});
  CHECK_THROWS_AS(dml::add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(dml::divide(a, Tensor::vector({1.0, 0.0})), std::domain_error);
  CHECK_THROWS_AS(dml::log_op(Tensor::vector({0.5, 0.0})), std::domain_error);
  CHECK_THROWS_AS(dml::log_op(Tensor::scalar(-1.0)), std::domain_error);
  CHECK_THROWS_AS(dml::matmul(Tensor::matrix(2, 3, std::vector<double>(6, 0.0)),
                              Tensor::matrix(2, 2, std::vector<double>(4, 0.0))),
                  std::invalid_argument);
  CHECK_THROWS_AS(dml::softmax(Tensor::matrix(2, 2, std::vector<double>(4, 0.0))),
                  std::invalid_argument);
  CHECK_THROWS_AS(dml::reshape(a, {3, 3}), std::invalid_argument);
  CHECK_THROWS_AS(dml::reduce_min(a, 2), std::invalid_argument);

  SECTION("backward requires a tracked scalar loss") {
    Tape tape;
    Tensor x = tape.variable(Tensor::vector({1, 2}));
    Tensor y = dml::relu(x);
    CHECK_THROWS_AS(tape.backward(y), std::invalid_argument);       // non-scalar
    CHECK_THROWS_AS(tape.backward(Tensor::scalar(1)), std::invalid_argument);  // untracked
    Tape other;
    Tensor z = other.variable(Tensor::scalar(1));
    CHECK_THROWS_AS(tape.backward(z), std::invalid_argument);       // wrong tape
  }
  SECTION("backward runs once per tape") {
    Tape tape;
    Tensor x = tape.variable(Tensor::scalar(2.0));
    Tensor loss = dml::mul(x, x);
    tape.backward(loss);
    CHECK_THROWS_AS(tape.backward(loss), std::logic_error);
  }
  SECTION("grad before backward is an error") {
    Tape tape;
    Tensor x = tape.variable(Tensor::scalar(2.0));
    CHECK_THROWS_AS(tape.grad(x), std::logic_error);
  }
  SECTION("operands from two different tapes are rejected") {
    Tape t1, t2;
    Tensor x = t1.variable(Tensor::scalar(1.0));
    Tensor y = t2.variable(Tensor::scalar(2.0));
    CHECK_THROWS_AS(dml::add(x, y), std::invalid_argument);
  }
}

TEST_CASE("identical graphs produce bit-identical gradients") {
  auto run = [] {
    Tape tape;
    Tensor x = tape.variable(Tensor::matrix(2, 2, {0.3, -0.7, 1.1, 0.25}));
    Tensor y = dml::reduce_mean(dml::sigmoid(dml::matmul(x, x)));
    tape.backward(y);
    return tape.grad(x);
  };
  std::vector<double> g1 = run(), g2 = run();
  REQUIRE(g1.size() == g2.size());
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == g2[i]);
}
