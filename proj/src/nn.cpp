#include "ddah/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddah/error.hpp"

namespace ddah {

namespace {

std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Matrix glorot_init(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  if (fan_in == 0 || fan_out == 0)
    throw InvalidArgument("glorot_init: dimensions must be positive, got " +
                          std::to_string(fan_in) + "x" + std::to_string(fan_out));
  const double bound = glorot_bound(fan_in, fan_out);
  Matrix w(fan_out, fan_in);
  // Row-major fill order so the draw sequence matches the serialized layout.
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
  return w;
}

DenseLayer DenseLayer::glorot(std::size_t fan_in, std::size_t fan_out, Activation act, Rng& rng) {
  DenseLayer layer;
  layer.weights = glorot_init(fan_in, fan_out, rng);
  layer.bias = Vector::Zero(static_cast<Eigen::Index>(fan_out));
  layer.activation = act;
  return layer;
}

std::size_t layer_input_dim(const Layer& layer) {
  if (const auto* d = std::get_if<DenseLayer>(&layer)) return d->fan_in();
  return std::get<DropoutLayer>(layer).width;
}

std::size_t layer_output_dim(const Layer& layer) {
  if (const auto* d = std::get_if<DenseLayer>(&layer)) return d->fan_out();
  return std::get<DropoutLayer>(layer).width;
}

Network::Network(std::vector<Layer> layers) {
  for (auto& layer : layers) add(std::move(layer));
}

void Network::add(Layer layer) {
  if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    if (d->weights.size() == 0)
      throw InvalidArgument("Network::add: dense layer has no weights");
    if (d->bias.size() != d->weights.rows())
      throw InvalidArgument("Network::add: bias length " + std::to_string(d->bias.size()) +
                            " does not match fan_out " + std::to_string(d->weights.rows()));
  } else {
    const auto& drop = std::get<DropoutLayer>(layer);
    if (!(drop.p >= 0.0 && drop.p < 1.0))
      throw InvalidArgument("Network::add: dropout p must lie in [0,1)");
    if (drop.width == 0) throw InvalidArgument("Network::add: dropout width must be positive");
  }
  if (!layers_.empty() && layer_output_dim(layers_.back()) != layer_input_dim(layer))
    throw InvalidArgument("Network::add: layer expects " + std::to_string(layer_input_dim(layer)) +
                          " inputs but previous layer produces " +
                          std::to_string(layer_output_dim(layers_.back())));
  layers_.push_back(std::move(layer));
}

std::size_t Network::input_dim() const {
  return layers_.empty() ? 0 : layer_input_dim(layers_.front());
}

std::size_t Network::output_dim() const {
  return layers_.empty() ? 0 : layer_output_dim(layers_.back());
}

std::vector<LayerShape> Network::geometry() const {
  std::vector<LayerShape> out;
  for (const auto& layer : layers_)
    if (const auto* d = std::get_if<DenseLayer>(&layer)) out.emplace_back(d->fan_in(), d->fan_out());
  return out;
}

std::size_t Network::dense_count() const {
  return static_cast<std::size_t>(std::count_if(layers_.begin(), layers_.end(), [](const Layer& l) {
    return std::holds_alternative<DenseLayer>(l);
  }));
}

Matrix sigmoid(const Matrix& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Matrix softmax_columns(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double peak = z.col(c).maxCoeff();
    out.col(c) = (z.col(c).array() - peak).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

namespace {

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
  Matrix z = layer.weights * input;
  z.colwise() += layer.bias;
  return layer.activation == Activation::sigmoid ? sigmoid(z) : softmax_columns(z);
}

void check_batch(const Network& net, const Matrix& batch) {
  if (net.empty()) throw InvalidArgument("forward: network has no layers");
  if (static_cast<std::size_t>(batch.rows()) != net.input_dim())
    throw InvalidArgument("forward: batch has " + std::to_string(batch.rows()) +
                          " features, network expects " + std::to_string(net.input_dim()));
}

Matrix draw_mask(const DropoutLayer& drop, Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double keep_scale = 1.0 / (1.0 - drop.p);
  Matrix mask(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) mask(r, c) = rng.bernoulli(drop.p) ? 0.0 : keep_scale;
  return mask;
}

}  // namespace

ForwardCache forward(const Network& net, const Matrix& batch, Mode mode, Rng& rng) {
  check_batch(net, batch);
  ForwardCache cache;
  cache.activations.reserve(net.size() + 1);
  cache.masks.resize(net.size());
  cache.activations.push_back(batch);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Matrix& in = cache.activations.back();
    if (const auto* d = std::get_if<DenseLayer>(&net.layers()[i])) {
      cache.activations.push_back(dense_forward(*d, in));
    } else if (mode == Mode::test) {
      cache.activations.push_back(in);
    } else {
      const auto& drop = std::get<DropoutLayer>(net.layers()[i]);
      cache.masks[i] = draw_mask(drop, in.rows(), in.cols(), rng);
      cache.activations.push_back(in.cwiseProduct(cache.masks[i]));
    }
  }
  return cache;
}

ForwardCache forward_with_masks(const Network& net, const Matrix& batch,
                                const std::vector<Matrix>& masks) {
  check_batch(net, batch);
  if (masks.size() != net.size())
    throw InvalidArgument("forward_with_masks: expected one mask slot per layer");
  ForwardCache cache;
  cache.activations.reserve(net.size() + 1);
  cache.masks = masks;
  cache.activations.push_back(batch);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Matrix& in = cache.activations.back();
    if (const auto* d = std::get_if<DenseLayer>(&net.layers()[i])) {
      cache.activations.push_back(dense_forward(*d, in));
    } else if (masks[i].size() == 0) {
      cache.activations.push_back(in);
    } else {
      if (masks[i].rows() != in.rows() || masks[i].cols() != in.cols())
        throw InvalidArgument("forward_with_masks: mask shape " +
                              shape_str(masks[i].rows(), masks[i].cols()) + " vs activation " +
                              shape_str(in.rows(), in.cols()));
      cache.activations.push_back(in.cwiseProduct(masks[i]));
    }
  }
  return cache;
}

Matrix predict(const Network& net, const Matrix& batch) {
  check_batch(net, batch);
  Matrix current = batch;
  for (const auto& layer : net.layers())
    if (const auto* d = std::get_if<DenseLayer>(&layer)) current = dense_forward(*d, current);
  return current;
}

double bce_loss(const Matrix& prediction, const Matrix& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
    throw InvalidArgument("bce_loss: prediction " + shape_str(prediction.rows(), prediction.cols()) +
                          " vs target " + shape_str(target.rows(), target.cols()));
  if (prediction.cols() == 0) throw InvalidArgument("bce_loss: empty batch");
  double total = 0.0;
  for (Eigen::Index c = 0; c < prediction.cols(); ++c) {
    for (Eigen::Index r = 0; r < prediction.rows(); ++r) {
      const double p = std::clamp(prediction(r, c), kBceClip, 1.0 - kBceClip);
      const double t = target(r, c);
      total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(prediction.cols());
}

Matrix bce_gradient(const Matrix& prediction, const Matrix& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
    throw InvalidArgument("bce_gradient: prediction " +
                          shape_str(prediction.rows(), prediction.cols()) + " vs target " +
                          shape_str(target.rows(), target.cols()));
  const double inv_n = 1.0 / static_cast<double>(prediction.cols());
  Matrix grad(prediction.rows(), prediction.cols());
  for (Eigen::Index c = 0; c < prediction.cols(); ++c) {
    for (Eigen::Index r = 0; r < prediction.rows(); ++r) {
      const double p = prediction(r, c);
      if (p < kBceClip || p > 1.0 - kBceClip) {
        grad(r, c) = 0.0;
      } else {
        grad(r, c) = (p - target(r, c)) / (p * (1.0 - p)) * inv_n;
      }
    }
  }
  return grad;
}

Gradients backward_from_output(const Network& net, const ForwardCache& cache,
                               const Matrix& output_grad) {
  if (cache.activations.size() != net.size() + 1 || cache.masks.size() != net.size())
    throw InvalidArgument("backward: cache does not belong to this network");
  const Matrix& out = cache.output();
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols())
    throw InvalidArgument("backward: gradient " + shape_str(output_grad.rows(), output_grad.cols()) +
                          " vs output " + shape_str(out.rows(), out.cols()));

  Gradients grads(net.dense_count());
  std::size_t dense_slot = grads.size();
  Matrix upstream = output_grad;
  for (std::size_t i = net.size(); i-- > 0;) {
    const Matrix& input = cache.activations[i];
    const Matrix& output = cache.activations[i + 1];
    if (const auto* d = std::get_if<DenseLayer>(&net.layers()[i])) {
      Matrix dz;
      if (d->activation == Activation::sigmoid) {
        dz = upstream.cwiseProduct(output.cwiseProduct((1.0 - output.array()).matrix()));
      } else {
        // Softmax Jacobian-vector product, column by column.
        const Eigen::RowVectorXd dots = output.cwiseProduct(upstream).colwise().sum();
        dz = output.cwiseProduct(upstream - Matrix::Ones(output.rows(), 1) * dots);
      }
      --dense_slot;
      grads[dense_slot].weights = dz * input.transpose();
      grads[dense_slot].bias = dz.rowwise().sum();
      if (i > 0) upstream = d->weights.transpose() * dz;
    } else if (cache.masks[i].size() != 0) {
      upstream = upstream.cwiseProduct(cache.masks[i]);
    }
  }
  return grads;
}

Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& target) {
  if (cache.activations.empty())
    throw InvalidArgument("backward: empty cache");
  return backward_from_output(net, cache, bce_gradient(cache.output(), target));
}

}  // namespace ddah
