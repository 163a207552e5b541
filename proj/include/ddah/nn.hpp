#pragma once

// Dense feed-forward network engine: sigmoid/softmax dense layers, inverted
// dropout, binary cross-entropy and hand-written backpropagation.
//
// Batches are column-major: a batch of n samples of dimension d is a d x n
// matrix, one sample per column.

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ddah/rng.hpp"

namespace ddah {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { sigmoid, softmax };
enum class Mode { train, test };

/// Clip applied to predictions before taking logarithms in the loss.
inline constexpr double kBceClip = 1e-7;

/// Uniform Glorot initialization: fan_out x fan_in weights drawn from
/// U(-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))).
Matrix glorot_init(std::size_t fan_in, std::size_t fan_out, Rng& rng);

double glorot_bound(std::size_t fan_in, std::size_t fan_out);

struct DenseLayer {
  Matrix weights;  // fan_out x fan_in
  Vector bias;     // fan_out
  Activation activation = Activation::sigmoid;

  /// Glorot-initialized weights, zero bias.
  static DenseLayer glorot(std::size_t fan_in, std::size_t fan_out, Activation act, Rng& rng);

  std::size_t fan_in() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t fan_out() const { return static_cast<std::size_t>(weights.rows()); }
};

struct DropoutLayer {
  double p = 0.2;
  std::size_t width = 0;
};

using Layer = std::variant<DenseLayer, DropoutLayer>;

using LayerShape = std::pair<std::size_t, std::size_t>;  // (fan_in, fan_out)

class Network {
 public:
  Network() = default;
  explicit Network(std::vector<Layer> layers);

  /// Appends a layer; throws InvalidArgument if its input width does not match
  /// the current output width.
  void add(Layer layer);

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  std::size_t size() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }

  std::size_t input_dim() const;
  std::size_t output_dim() const;

  /// (fan_in, fan_out) of every dense layer, in order.
  std::vector<LayerShape> geometry() const;
  std::size_t dense_count() const;

 private:
  std::vector<Layer> layers_;
};

std::size_t layer_input_dim(const Layer& layer);
std::size_t layer_output_dim(const Layer& layer);

/// Activations of every layer plus the dropout masks drawn for this pass.
/// activations[0] is the input batch; activations[i + 1] is the output of
/// layer i. masks[i] is empty unless layer i is a dropout layer in train mode,
/// in which case it holds 0 or 1/(1-p) per entry.
struct ForwardCache {
  std::vector<Matrix> activations;
  std::vector<Matrix> masks;

  const Matrix& output() const { return activations.back(); }
};

ForwardCache forward(const Network& net, const Matrix& batch, Mode mode, Rng& rng);

/// Train-mode forward pass that reuses previously drawn dropout masks. An
/// empty mask for a dropout layer makes it the identity.
ForwardCache forward_with_masks(const Network& net, const Matrix& batch,
                                const std::vector<Matrix>& masks);

/// Test-mode forward pass. Safe to call concurrently on a shared network.
Matrix predict(const Network& net, const Matrix& batch);

Matrix sigmoid(const Matrix& z);
Matrix softmax_columns(const Matrix& z);

/// Mean over samples of the per-sample binary cross-entropy
/// -sum_j [t log p + (1 - t) log(1 - p)], with p clipped to [kBceClip, 1 - kBceClip].
double bce_loss(const Matrix& prediction, const Matrix& target);

/// d(bce_loss)/d(prediction). Zero where the clip is active.
Matrix bce_gradient(const Matrix& prediction, const Matrix& target);

struct DenseGradient {
  Matrix weights;
  Vector bias;
};

/// One entry per dense layer, in network order.
using Gradients = std::vector<DenseGradient>;

/// Backpropagates d(loss)/d(output) through the cached pass.
Gradients backward_from_output(const Network& net, const ForwardCache& cache,
                               const Matrix& output_grad);

/// Gradients of bce_loss(output, target) w.r.t. every dense parameter.
Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& target);

}  // namespace ddah
