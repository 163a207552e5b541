#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ddah/nn.hpp"
#include "ddah/optimizer.hpp"

namespace ddah {

struct TrainOptions {
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
};

/// Called after every epoch with the zero-based epoch index and its mean loss.
using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Mini-batch backpropagation on the BCE loss. Sample order is reshuffled
/// every epoch from rng; the final partial batch is trained. Returns the mean
/// per-sample training loss of every epoch.
std::vector<double> train_epochs(Network& net, const Matrix& inputs, const Matrix& targets,
                                 const TrainOptions& options, OptimizerState& optimizer, Rng& rng,
                                 const EpochCallback& on_epoch = {});

/// Test-mode BCE over a whole data set, evaluated in chunks.
double evaluate_loss(const Network& net, const Matrix& inputs, const Matrix& targets);

}  // namespace ddah
