#include "ddah/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ddah/error.hpp"

namespace ddah {

std::vector<double> train_epochs(Network& net, const Matrix& inputs, const Matrix& targets,
                                 const TrainOptions& options, OptimizerState& optimizer, Rng& rng,
                                 const EpochCallback& on_epoch) {
  if (inputs.cols() == 0) throw InvalidArgument("train_epochs: no training samples");
  if (options.batch_size == 0) throw InvalidArgument("train_epochs: batch size must be >= 1");
  if (targets.cols() != inputs.cols())
    throw InvalidArgument("train_epochs: " + std::to_string(inputs.cols()) + " inputs but " +
                          std::to_string(targets.cols()) + " targets");
  if (static_cast<std::size_t>(targets.rows()) != net.output_dim())
    throw InvalidArgument("train_epochs: target dimension " + std::to_string(targets.rows()) +
                          " does not match network output " + std::to_string(net.output_dim()));

  const auto n = static_cast<std::size_t>(inputs.cols());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  std::vector<double> history;
  history.reserve(options.epochs);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span<Eigen::Index>(order));
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t stop = std::min(n, start + options.batch_size);
      std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(stop));
      const Matrix x = inputs(Eigen::all, idx);
      const Matrix t = targets(Eigen::all, idx);
      const ForwardCache cache = forward(net, x, Mode::train, rng);
      total += bce_loss(cache.output(), t) * static_cast<double>(idx.size());
      optimizer.step(net, backward(net, cache, t));
    }
    history.push_back(total / static_cast<double>(n));
    if (on_epoch) on_epoch(epoch, history.back());
  }
  return history;
}

double evaluate_loss(const Network& net, const Matrix& inputs, const Matrix& targets) {
  if (inputs.cols() == 0) throw InvalidArgument("evaluate_loss: no samples");
  constexpr Eigen::Index kChunk = 256;
  double total = 0.0;
  for (Eigen::Index start = 0; start < inputs.cols(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, inputs.cols() - start);
    const Matrix out = predict(net, inputs.middleCols(start, len));
    total += bce_loss(out, targets.middleCols(start, len)) * static_cast<double>(len);
  }
  return total / static_cast<double>(inputs.cols());
}

}  // namespace ddah
