#include "doctest.h"
#include "ddah/error.hpp"
#include "ddah/trainer.hpp"

using namespace ddah;

namespace {

// Binary patterns built from a few prototypes with 5% bit noise.
Matrix prototype_patterns(std::size_t dim, std::size_t n, std::size_t prototypes, Rng& rng) {
  Matrix protos(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(prototypes));
  for (Eigen::Index c = 0; c < protos.cols(); ++c)
    for (Eigen::Index r = 0; r < protos.rows(); ++r) protos(r, c) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  Matrix data(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    data.col(c) = protos.col(c % protos.cols());
    for (Eigen::Index r = 0; r < data.rows(); ++r)
      if (rng.bernoulli(0.05)) data(r, c) = 1.0 - data(r, c);
  }
  return data;
}

Network toy_dae(Rng& rng) {
  return Network({DropoutLayer{0.2, 64}, DenseLayer::glorot(64, 16, Activation::sigmoid, rng),
                  DenseLayer::glorot(16, 64, Activation::sigmoid, rng)});
}

}  // namespace

TEST_CASE("train_epochs halves the reconstruction loss of a toy autoencoder") {
  Rng rng(2024);
  const Matrix data = prototype_patterns(64, 200, 8, rng);
  Network net = toy_dae(rng);
  OptimizerState opt({OptimizerKind::rmsprop}, net);
  const auto history = train_epochs(net, data, data, {100, 16}, opt, rng);
  REQUIRE(history.size() == 100);
  CHECK(history.back() < 0.5 * history.front());
  // 200 samples in batches of 16 -> 13 updates per epoch, last batch partial.
  CHECK(opt.steps() == 1300);
}

TEST_CASE("train_epochs is deterministic and epochs=0 is a no-op") {
  Rng data_rng(5);
  const Matrix data = prototype_patterns(64, 40, 4, data_rng);
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    Network net = toy_dae(rng);
    OptimizerState opt({OptimizerKind::adam}, net);
    auto history = train_epochs(net, data, data, {5, 16}, opt, rng);
    return std::make_pair(history, std::get<DenseLayer>(net.layers()[1]).weights);
  };
  const auto a = run(77);
  const auto b = run(77);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);

  Rng rng(1);
  Network net = toy_dae(rng);
  const Network before = net;
  OptimizerState opt({OptimizerKind::rmsprop}, net);
  CHECK(train_epochs(net, data, data, {0, 16}, opt, rng).empty());
  CHECK(std::get<DenseLayer>(net.layers()[1]).weights == std::get<DenseLayer>(before.layers()[1]).weights);
}

TEST_CASE("train_epochs argument errors") {
  Rng rng(1);
  Network net = toy_dae(rng);
  OptimizerState opt({OptimizerKind::rmsprop}, net);
  CHECK_THROWS_AS(train_epochs(net, Matrix(64, 0), Matrix(64, 0), {}, opt, rng), InvalidArgument);
  const Matrix data = Matrix::Constant(64, 4, 0.5);
  CHECK_THROWS_AS(train_epochs(net, data, data, {1, 0}, opt, rng), InvalidArgument);
  CHECK_THROWS_AS(train_epochs(net, data, Matrix::Constant(32, 4, 0.5), {1, 16}, opt, rng), InvalidArgument);
}
