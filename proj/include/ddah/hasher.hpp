#pragma once

// Deep de-noising autoencoder hashing: greedy layer-wise de-noising
// pretraining, end-to-end fine-tuning with dropout before the coding layer,
// decoder removal and thresholding of the coding layer into binary codes.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddah/binary_code.hpp"
#include "ddah/nn.hpp"
#include "ddah/optimizer.hpp"
#include "ddah/trainer.hpp"

namespace ddah {

/// Chained (fan_in, fan_out) pairs of the encoder, e.g.
/// [(1024,768),(768,512),(512,16)]. The last fan_out is the code length.
class EncoderGeometry {
 public:
  EncoderGeometry() = default;
  explicit EncoderGeometry(std::vector<LayerShape> layers);

  /// "1024x768,768x512" or the shorthand "1024-768-512".
  static EncoderGeometry parse(std::string_view text);

  const std::vector<LayerShape>& layers() const { return layers_; }
  std::size_t size() const { return layers_.size(); }
  std::size_t input_dim() const { return layers_.front().first; }
  std::size_t code_length() const { return layers_.back().second; }
  std::string to_string() const;

  friend bool operator==(const EncoderGeometry&, const EncoderGeometry&) = default;

 private:
  std::vector<LayerShape> layers_;
};

struct PretrainOptions {
  TrainOptions train{};
  double dropout_p = 0.2;
  OptimizerConfig optimizer{OptimizerKind::rmsprop};
};

/// Weights produced by layer-wise pretraining; encoders[i] maps
/// geometry[i].first -> geometry[i].second and decoders[i] maps back.
struct PretrainedStack {
  std::vector<DenseLayer> encoders;
  std::vector<DenseLayer> decoders;
  std::vector<std::vector<double>> loss_histories;
};

/// (layer index, epoch, loss) progress hook shared by the training stages.
using StageCallback = std::function<void(std::size_t layer, std::size_t epoch, double loss)>;

/// Trains each geometry pair as its own de-noising autoencoder
/// Dropout(p) -> Sigmoid(in->out) -> Sigmoid(out->in), reconstructing the
/// clean input. Layer i > 0 is trained on the test-mode encoding produced by
/// the already trained layers. images is dim x n, values in [0,1].
PretrainedStack layer_train(const Matrix& images, const EncoderGeometry& geometry,
                            const PretrainOptions& options, Rng& rng,
                            const StageCallback& on_epoch = {});

struct FineTuneOptions {
  TrainOptions train{};
  double dropout_p = 0.2;
  OptimizerConfig optimizer{OptimizerKind::rmsprop};
  bool use_dropout = true;
  Activation output_activation = Activation::softmax;
};

/// Stacks the pretrained layers into the full autoencoder: encoder sigmoid
/// layers with Dropout(p) directly before the coding layer (omitted when
/// use_dropout is false), then the mirrored decoder whose last layer uses
/// output_activation and whose earlier layers are sigmoid.
Network assemble_autoencoder(const EncoderGeometry& geometry, const PretrainedStack& stack,
                             bool use_dropout, double dropout_p, Activation output_activation);

struct FineTuneResult {
  Network model;
  std::vector<double> history;
};

FineTuneResult fine_tune(const Matrix& images, const EncoderGeometry& geometry,
                         const PretrainedStack& stack, const FineTuneOptions& options, Rng& rng,
                         const EpochCallback& on_epoch = {});

/// True when the dense layers form a mirrored autoencoder (2n dense layers,
/// dense i and dense 2n-1-i transposed in shape).
bool is_autoencoder(const Network& model);

/// Drops the decoder half, keeping every layer up to the coding layer.
/// Throws InvalidState when no coding layer can be identified.
Network build_encoder(const Network& model);

/// bit i = 1 iff activations[i] > 0.5.
BinaryCode binarize(std::span<const double> activations);
BinaryCode binarize(const Vector& activations);

/// Encodes every column of images. Work may be split across worker threads;
/// each image's code depends only on the model and its pixels.
std::vector<BinaryCode> encode(const Network& encoder, const Matrix& images, unsigned threads = 1);

}  // namespace ddah
