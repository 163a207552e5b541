#include "ddah/optimizer.hpp"

#include <cmath>
#include <string>

#include "ddah/error.hpp"

namespace ddah {

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "rmsprop") return OptimizerKind::rmsprop;
  if (name == "adam") return OptimizerKind::adam;
  throw InvalidArgument("unknown optimizer '" + std::string(name) + "' (expected rmsprop or adam)");
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::adam ? "adam" : "rmsprop";
}

OptimizerState::OptimizerState(const OptimizerConfig& config, const Network& net) : config_(config) {
  if (!(config.learning_rate > 0.0)) throw InvalidArgument("optimizer: learning rate must be positive");
  for (const auto& layer : net.layers()) {
    const auto* d = std::get_if<DenseLayer>(&layer);
    if (!d) continue;
    second_w_.push_back(Matrix::Zero(d->weights.rows(), d->weights.cols()));
    second_b_.push_back(Vector::Zero(d->bias.size()));
    if (config.kind == OptimizerKind::adam) {
      first_w_.push_back(Matrix::Zero(d->weights.rows(), d->weights.cols()));
      first_b_.push_back(Vector::Zero(d->bias.size()));
    }
  }
}

template <typename Param>
void OptimizerState::update(Param& param, const Param& grad, Param& first, Param& second,
                            double bc1, double bc2) const {
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;
  if (config_.kind == OptimizerKind::rmsprop) {
    second = config_.rho * second + (1.0 - config_.rho) * grad.cwiseAbs2();
    param.array() -= lr * grad.array() / (second.array() + eps).sqrt();
  } else {
    first = config_.beta1 * first + (1.0 - config_.beta1) * grad;
    second = config_.beta2 * second + (1.0 - config_.beta2) * grad.cwiseAbs2();
    param.array() -= lr * (first.array() / bc1) / ((second.array() / bc2).sqrt() + eps);
  }
}

void OptimizerState::step(Network& net, const Gradients& grads) {
  if (grads.size() != second_w_.size())
    throw InvalidArgument("optimizer: " + std::to_string(grads.size()) + " gradients for " +
                          std::to_string(second_w_.size()) + " dense layers");
  std::size_t slot = 0;
  for (auto& layer : net.layers()) {
    auto* d = std::get_if<DenseLayer>(&layer);
    if (!d) continue;
    const auto& g = grads[slot];
    if (g.weights.rows() != d->weights.rows() || g.weights.cols() != d->weights.cols() ||
        g.bias.size() != d->bias.size() || second_w_[slot].rows() != d->weights.rows() ||
        second_w_[slot].cols() != d->weights.cols())
      throw InvalidArgument("optimizer: gradient shape mismatch at dense layer " +
                            std::to_string(slot));
    ++slot;
  }

  ++steps_;
  const double t = static_cast<double>(steps_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  Matrix unused_w;
  Vector unused_b;
  slot = 0;
  for (auto& layer : net.layers()) {
    auto* d = std::get_if<DenseLayer>(&layer);
    if (!d) continue;
    const bool adam = config_.kind == OptimizerKind::adam;
    update(d->weights, grads[slot].weights, adam ? first_w_[slot] : unused_w, second_w_[slot], bc1,
           bc2);
    update(d->bias, grads[slot].bias, adam ? first_b_[slot] : unused_b, second_b_[slot], bc1, bc2);
    ++slot;
  }
}

}  // namespace ddah
