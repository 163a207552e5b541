#include <cmath>

#include "doctest.h"
#include "ddah/error.hpp"
#include "ddah/nn.hpp"
#include "support/oracles.hpp"

using namespace ddah;

namespace {

Matrix random_batch(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform();
  return m;
}

DenseLayer random_dense(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  DenseLayer d = DenseLayer::glorot(in, out, act, rng);
  for (Eigen::Index i = 0; i < d.bias.size(); ++i) d.bias(i) = rng.uniform(-0.5, 0.5);
  return d;
}

}  // namespace

TEST_CASE("glorot_init respects the analytic bound") {
  Rng rng(7);
  const Matrix w = glorot_init(1024, 768, rng);
  CHECK(w.rows() == 768);
  CHECK(w.cols() == 1024);
  const double bound = std::sqrt(6.0 / 1792.0);
  CHECK(bound == doctest::Approx(0.05787).epsilon(1e-4));
  CHECK(w.cwiseAbs().maxCoeff() <= bound);
  // Uniform draws should come close to the bound on 786k samples.
  CHECK(w.cwiseAbs().maxCoeff() > 0.99 * bound);

  Rng one(1);
  const Matrix w1 = glorot_init(1, 1, one);
  CHECK(std::abs(w1(0, 0)) <= std::sqrt(3.0));

  Rng a(42), b(42);
  CHECK(glorot_init(30, 20, a) == glorot_init(30, 20, b));

  Rng r(3);
  CHECK_THROWS_AS(glorot_init(0, 5, r), InvalidArgument);
  CHECK_THROWS_AS(glorot_init(5, 0, r), InvalidArgument);

  const DenseLayer d = DenseLayer::glorot(12, 5, Activation::sigmoid, r);
  CHECK(d.bias.isZero());
  CHECK(d.fan_in() == 12);
  CHECK(d.fan_out() == 5);
}

TEST_CASE("network rejects mismatched layer chains") {
  Rng rng(1);
  Network net;
  net.add(DenseLayer::glorot(8, 4, Activation::sigmoid, rng));
  CHECK_THROWS_AS(net.add(DenseLayer::glorot(5, 8, Activation::sigmoid, rng)), InvalidArgument);
  CHECK_THROWS_AS(net.add(DropoutLayer{0.2, 8}), InvalidArgument);
  CHECK_THROWS_AS(net.add(DropoutLayer{1.0, 4}), InvalidArgument);
  net.add(DropoutLayer{0.2, 4});
  net.add(DenseLayer::glorot(4, 8, Activation::softmax, rng));
  CHECK(net.input_dim() == 8);
  CHECK(net.output_dim() == 8);
  CHECK(net.dense_count() == 2);
  CHECK(net.geometry() == std::vector<LayerShape>{{8, 4}, {4, 8}});
}

TEST_CASE("forward: sigmoid of zero and uniform softmax") {
  Rng rng(0);
  DenseLayer zero;
  zero.weights = Matrix::Zero(3, 5);
  zero.bias = Vector::Zero(3);
  Network net({zero});
  const Matrix out = forward(net, random_batch(5, 4, rng), Mode::test, rng).output();
  CHECK((out.array() == 0.5).all());

  DenseLayer soft;
  soft.weights = Matrix::Zero(4, 2);
  soft.bias = Vector::Zero(4);
  soft.activation = Activation::softmax;
  const Matrix p = predict(Network({soft}), random_batch(2, 3, rng));
  CHECK((p.array() - 0.25).abs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(forward(net, Matrix::Zero(4, 2), Mode::test, rng), InvalidArgument);
}

TEST_CASE("softmax columns sum to one") {
  Rng rng(5);
  Network net({random_dense(6, 9, Activation::softmax, rng)});
  const Matrix p = predict(net, random_batch(6, 20, rng) * 10.0);
  CHECK((p.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
  CHECK((p.array() >= 0.0).all());
}

TEST_CASE("dropout: fraction zeroed, test-mode identity, inverted scaling") {
  Rng rng(11);
  Network drop({DropoutLayer{0.2, 10000}});
  const Matrix ones = Matrix::Ones(10000, 1);
  const Matrix out = forward(drop, ones, Mode::train, rng).output();
  const double zeroed = static_cast<double>((out.array() == 0.0).count()) / 10000.0;
  CHECK(zeroed >= 0.18);
  CHECK(zeroed <= 0.22);
  CHECK(((out.array() == 0.0) || (out.array() == 1.25)).all());

  // Test mode equals the same network without its dropout layer, exactly.
  Rng init(3);
  DenseLayer a = random_dense(7, 5, Activation::sigmoid, init);
  DenseLayer b = random_dense(5, 7, Activation::softmax, init);
  Network with({DropoutLayer{0.3, 7}, a, DropoutLayer{0.2, 5}, b});
  Network without({a, b});
  const Matrix x = random_batch(7, 6, init);
  CHECK(forward(with, x, Mode::test, rng).output() == forward(without, x, Mode::test, rng).output());

  // Averaging many train-mode passes recovers the no-dropout value.
  Network scaled({DropoutLayer{0.2, 1}, DenseLayer{Matrix::Constant(1, 1, 1.0), Vector::Zero(1)}});
  Network plain({DenseLayer{Matrix::Constant(1, 1, 1.0), Vector::Zero(1)}});
  const Matrix input = Matrix::Constant(1, 20000, 0.8);
  const double expected = predict(plain, input)(0, 0);
  const double mean = forward(scaled, input, Mode::train, rng).output().mean();
  CHECK(std::abs(mean - expected) / expected < 0.02);
}

TEST_CASE("bce_loss values") {
  const Matrix half = Matrix::Constant(4, 3, 0.5);
  CHECK(bce_loss(half, half) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));

  Matrix t(4, 1);
  t << 0, 1, 1, 0;
  CHECK(bce_loss(t, t) <= 4.01e-7);
  CHECK(bce_loss(t, t) >= 0.0);

  // Minimum over p at p = t.
  Matrix target = Matrix::Constant(1, 1, 0.3);
  const double at_t = bce_loss(target, target);
  for (double p : {0.1, 0.25, 0.29, 0.31, 0.5, 0.9}) CHECK(bce_loss(Matrix::Constant(1, 1, p), target) > at_t);

  CHECK_THROWS_AS(bce_loss(Matrix::Zero(2, 2), Matrix::Zero(3, 2)), InvalidArgument);
}

TEST_CASE("backward: single sigmoid unit by hand") {
  DenseLayer unit{Matrix::Zero(1, 1), Vector::Zero(1)};
  Network net({unit});
  Rng rng(0);
  const Matrix x = Matrix::Ones(1, 1);
  const auto cache = forward(net, x, Mode::train, rng);
  const Gradients g = backward(net, cache, Matrix::Ones(1, 1));
  CHECK(g[0].weights(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(g[0].bias(0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("backward: gradient shapes and zero signal at the optimum") {
  Rng rng(9);
  Network net({DropoutLayer{0.5, 6}, random_dense(6, 3, Activation::sigmoid, rng),
               random_dense(3, 6, Activation::sigmoid, rng)});
  const Matrix x = random_batch(6, 5, rng);
  const auto cache = forward(net, x, Mode::train, rng);
  const Gradients g = backward(net, cache, x);
  REQUIRE(g.size() == 2);
  CHECK(g[0].weights.rows() == 3);
  CHECK(g[0].weights.cols() == 6);
  CHECK(g[1].bias.size() == 6);

  // Inputs zeroed by dropout get no first-layer weight gradient.
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (cache.activations[1].row(i).isZero()) CHECK(g[0].weights.col(i).isZero());
  }

  const Gradients still = backward(net, cache, cache.output());
  for (const auto& layer : still) {
    CHECK(layer.weights.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(layer.bias.cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(backward(net, cache, Matrix::Zero(5, 5)), InvalidArgument);
}

TEST_CASE("backward matches central finite differences for every layer kind") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    Network net({DropoutLayer{0.2, 10}, random_dense(10, 6, Activation::sigmoid, rng),
                 DropoutLayer{0.2, 6}, random_dense(6, 4, Activation::sigmoid, rng),
                 random_dense(4, 10, Activation::softmax, rng)});
    const Matrix x = random_batch(10, 7, rng);
    const auto cache = forward(net, x, Mode::train, rng);
    const auto res = oracle::check_gradients(net, x, x, cache.masks, backward(net, cache, x));
    CHECK(res.checked == 10 * 6 + 6 + 6 * 4 + 4 + 4 * 10 + 10);
    CHECK(res.max_rel_error < 1e-4);
  }
}
