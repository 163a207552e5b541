#include "ddah/hasher.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <thread>

#include "ddah/error.hpp"

namespace ddah {

EncoderGeometry::EncoderGeometry(std::vector<LayerShape> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("encoder geometry: no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].first == 0 || layers_[i].second == 0)
      throw InvalidArgument("encoder geometry: zero dimension in pair " + std::to_string(i));
    if (i > 0 && layers_[i - 1].second != layers_[i].first)
      throw InvalidArgument("encoder geometry: pair " + std::to_string(i) + " expects " +
                            std::to_string(layers_[i].first) + " inputs but pair " +
                            std::to_string(i - 1) + " produces " +
                            std::to_string(layers_[i - 1].second));
  }
}

namespace {

std::size_t parse_dim(std::string_view token) {
  std::size_t value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || token.empty())
    throw InvalidArgument("encoder geometry: bad dimension '" + std::string(token) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

EncoderGeometry EncoderGeometry::parse(std::string_view text) {
  std::vector<LayerShape> layers;
  if (text.find('x') != std::string_view::npos) {
    for (auto pair : split(text, ',')) {
      const auto dims = split(pair, 'x');
      if (dims.size() != 2) throw InvalidArgument("encoder geometry: bad pair '" + std::string(pair) + "'");
      layers.emplace_back(parse_dim(dims[0]), parse_dim(dims[1]));
    }
  } else {
    const auto dims = split(text, '-');
    if (dims.size() < 2) throw InvalidArgument("encoder geometry: need at least two widths");
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
      layers.emplace_back(parse_dim(dims[i]), parse_dim(dims[i + 1]));
  }
  return EncoderGeometry(std::move(layers));
}

std::string EncoderGeometry::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    out << (i ? "," : "") << layers_[i].first << 'x' << layers_[i].second;
  return out.str();
}

PretrainedStack layer_train(const Matrix& images, const EncoderGeometry& geometry,
                            const PretrainOptions& options, Rng& rng,
                            const StageCallback& on_epoch) {
  if (geometry.size() == 0) throw InvalidArgument("layer_train: empty geometry");
  if (static_cast<std::size_t>(images.rows()) != geometry.input_dim())
    throw InvalidArgument("layer_train: images have " + std::to_string(images.rows()) +
                          " pixels, geometry expects " + std::to_string(geometry.input_dim()));
  if (images.cols() == 0) throw InvalidArgument("layer_train: no images");

  PretrainedStack stack;
  Matrix layer_input = images;
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    const auto [fan_in, fan_out] = geometry.layers()[i];
    Network dae;
    dae.add(DropoutLayer{options.dropout_p, fan_in});
    dae.add(DenseLayer::glorot(fan_in, fan_out, Activation::sigmoid, rng));
    dae.add(DenseLayer::glorot(fan_out, fan_in, Activation::sigmoid, rng));

    OptimizerState optimizer(options.optimizer, dae);
    EpochCallback hook;
    if (on_epoch) hook = [&, i](std::size_t e, double loss) { on_epoch(i, e, loss); };
    stack.loss_histories.push_back(
        train_epochs(dae, layer_input, layer_input, options.train, optimizer, rng, hook));

    stack.encoders.push_back(std::get<DenseLayer>(dae.layers()[1]));
    stack.decoders.push_back(std::get<DenseLayer>(dae.layers()[2]));

    if (i + 1 < geometry.size()) {
      Network encoder;
      encoder.add(stack.encoders.back());
      layer_input = predict(encoder, layer_input);
    }
  }
  return stack;
}

Network assemble_autoencoder(const EncoderGeometry& geometry, const PretrainedStack& stack,
                             bool use_dropout, double dropout_p, Activation output_activation) {
  const std::size_t n = geometry.size();
  if (stack.encoders.size() != n || stack.decoders.size() != n)
    throw InvalidArgument("fine_tune: weight lists do not match geometry length " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto [fan_in, fan_out] = geometry.layers()[i];
    const auto& enc = stack.encoders[i];
    const auto& dec = stack.decoders[i];
    if (enc.fan_in() != fan_in || enc.fan_out() != fan_out || dec.fan_in() != fan_out ||
        dec.fan_out() != fan_in)
      throw InvalidArgument("fine_tune: pretrained weights for pair " + std::to_string(i) +
                            " do not match (" + std::to_string(fan_in) + "," +
                            std::to_string(fan_out) + ")");
  }

  Network model;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 == n && use_dropout) model.add(DropoutLayer{dropout_p, geometry.layers()[i].first});
    DenseLayer enc = stack.encoders[i];
    enc.activation = Activation::sigmoid;
    model.add(std::move(enc));
  }
  for (std::size_t j = n; j-- > 0;) {
    DenseLayer dec = stack.decoders[j];
    dec.activation = j == 0 ? output_activation : Activation::sigmoid;
    model.add(std::move(dec));
  }
  return model;
}

FineTuneResult fine_tune(const Matrix& images, const EncoderGeometry& geometry,
                         const PretrainedStack& stack, const FineTuneOptions& options, Rng& rng,
                         const EpochCallback& on_epoch) {
  if (static_cast<std::size_t>(images.rows()) != geometry.input_dim())
    throw InvalidArgument("fine_tune: images have " + std::to_string(images.rows()) +
                          " pixels, geometry expects " + std::to_string(geometry.input_dim()));
  FineTuneResult result{assemble_autoencoder(geometry, stack, options.use_dropout,
                                             options.dropout_p, options.output_activation),
                        {}};
  OptimizerState optimizer(options.optimizer, result.model);
  result.history = train_epochs(result.model, images, images, options.train, optimizer, rng, on_epoch);
  return result;
}

bool is_autoencoder(const Network& model) {
  const auto shapes = model.geometry();
  if (shapes.empty() || shapes.size() % 2 != 0) return false;
  const std::size_t n = shapes.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const auto& enc = shapes[i];
    const auto& dec = shapes[n - 1 - i];
    if (enc.first != dec.second || enc.second != dec.first) return false;
  }
  return true;
}

Network build_encoder(const Network& model) {
  if (!is_autoencoder(model))
    throw InvalidState("build_encoder: model is not a mirrored autoencoder, no coding layer");
  const std::size_t coding_dense = model.dense_count() / 2;
  Network encoder;
  std::size_t dense_seen = 0;
  for (const auto& layer : model.layers()) {
    encoder.add(layer);
    if (std::holds_alternative<DenseLayer>(layer) && ++dense_seen == coding_dense) break;
  }
  const auto& coding = std::get<DenseLayer>(encoder.layers().back());
  if (coding.activation != Activation::sigmoid)
    throw InvalidState("build_encoder: coding layer is not a sigmoid layer");
  return encoder;
}

BinaryCode binarize(std::span<const double> activations) {
  BinaryCode code(activations.size());
  for (std::size_t i = 0; i < activations.size(); ++i)
    if (activations[i] > 0.5) code.set(i, true);
  return code;
}

BinaryCode binarize(const Vector& activations) {
  return binarize(std::span<const double>(activations.data(), static_cast<std::size_t>(activations.size())));
}

std::vector<BinaryCode> encode(const Network& encoder, const Matrix& images, unsigned threads) {
  if (static_cast<std::size_t>(images.rows()) != encoder.input_dim())
    throw InvalidArgument("encode: images have " + std::to_string(images.rows()) +
                          " pixels, encoder expects " + std::to_string(encoder.input_dim()));
  const auto n = static_cast<std::size_t>(images.cols());
  std::vector<BinaryCode> codes(n);
  constexpr std::size_t kChunk = 64;
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t start = begin; start < end; start += kChunk) {
      const std::size_t len = std::min(kChunk, end - start);
      const Matrix act = predict(encoder, images.middleCols(static_cast<Eigen::Index>(start),
                                                             static_cast<Eigen::Index>(len)));
      for (std::size_t c = 0; c < len; ++c) codes[start + c] = binarize(Vector(act.col(static_cast<Eigen::Index>(c))));
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    // Ranges are multiples of the chunk size so every column sees the same
    // batch composition regardless of the thread count.
    const std::size_t per = ((n + threads - 1) / threads + kChunk - 1) / kChunk * kChunk;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(n, t * per);
      const std::size_t end = std::min(n, begin + per);
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return codes;
}

}  // namespace ddah
