#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ddah/nn.hpp"

namespace ddah {

enum class OptimizerKind { rmsprop, adam };

OptimizerKind parse_optimizer(std::string_view name);
std::string_view to_string(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::rmsprop;
  double learning_rate = 1e-3;
  double rho = 0.9;  // RMSProp squared-gradient decay
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter accumulators for RMSProp or Adam over the dense layers of one
/// network.
///
/// RMSProp:  acc = rho*acc + (1-rho)*g^2;  w -= lr * g / sqrt(acc + eps)
/// Adam:     m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2;
///           w -= lr * mhat / (sqrt(vhat) + eps) with bias-corrected mhat, vhat
class OptimizerState {
 public:
  OptimizerState(const OptimizerConfig& config, const Network& net);

  /// Applies one update; throws InvalidArgument on any shape mismatch.
  void step(Network& net, const Gradients& grads);

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t steps() const { return steps_; }

  // Accumulators, one per dense layer. first_* is unused by RMSProp.
  const std::vector<Matrix>& second_moment_weights() const { return second_w_; }
  const std::vector<Vector>& second_moment_bias() const { return second_b_; }
  const std::vector<Matrix>& first_moment_weights() const { return first_w_; }
  const std::vector<Vector>& first_moment_bias() const { return first_b_; }

 private:
  template <typename Param>
  void update(Param& param, const Param& grad, Param& first, Param& second, double bc1,
              double bc2) const;

  OptimizerConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<Matrix> first_w_, second_w_;
  std::vector<Vector> first_b_, second_b_;
};

}  // namespace ddah
