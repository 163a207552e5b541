#include "ddah/model_io.hpp"

#include <fstream>
#include <string>

#include "ddah/binio.hpp"
#include "ddah/error.hpp"

namespace ddah {

namespace {

constexpr char kSigmoidTag = 'S';
constexpr char kSoftmaxTag = 'X';
constexpr char kDropoutTag = 'D';

// Sanity cap on a single dimension so a corrupt header cannot request
// terabytes of memory.
constexpr std::uint32_t kMaxDim = 1u << 20;

}  // namespace

void save_model(std::ostream& out, const Network& net) {
  out.write(kModelMagic.data(), static_cast<std::streamsize>(kModelMagic.size()));
  binio::put_u32(out, static_cast<std::uint32_t>(net.size()));
  for (const auto& layer : net.layers()) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      out.put(d->activation == Activation::sigmoid ? kSigmoidTag : kSoftmaxTag);
      binio::put_u32(out, static_cast<std::uint32_t>(d->fan_in()));
      binio::put_u32(out, static_cast<std::uint32_t>(d->fan_out()));
      binio::put_f64(out, 0.0);
    } else {
      const auto& drop = std::get<DropoutLayer>(layer);
      out.put(kDropoutTag);
      binio::put_u32(out, static_cast<std::uint32_t>(drop.width));
      binio::put_u32(out, static_cast<std::uint32_t>(drop.width));
      binio::put_f64(out, drop.p);
    }
  }
  for (const auto& layer : net.layers()) {
    const auto* d = std::get_if<DenseLayer>(&layer);
    if (!d) continue;
    for (Eigen::Index r = 0; r < d->weights.rows(); ++r)
      for (Eigen::Index c = 0; c < d->weights.cols(); ++c) binio::put_f64(out, d->weights(r, c));
    for (Eigen::Index r = 0; r < d->bias.size(); ++r) binio::put_f64(out, d->bias(r));
  }
}

Network load_model(std::istream& in) {
  std::string magic(kModelMagic.size(), '\0');
  if (!in.read(magic.data(), static_cast<std::streamsize>(magic.size())))
    throw LoadError("model: file shorter than magic header");
  if (magic != kModelMagic)
    throw LoadError("model: bad magic, expected '" + std::string(kModelMagic) + "', found '" +
                    magic + "'");

  struct Header {
    char tag;
    std::uint32_t fan_in, fan_out;
    double p;
  };
  const std::uint32_t count = binio::get_u32(in);
  if (count == 0 || count > 1024) throw LoadError("model: implausible layer count " + std::to_string(count));
  std::vector<Header> headers(count);
  for (auto& h : headers) {
    h.tag = static_cast<char>(binio::get_u8(in));
    h.fan_in = binio::get_u32(in);
    h.fan_out = binio::get_u32(in);
    h.p = binio::get_f64(in);
    if (h.tag != kSigmoidTag && h.tag != kSoftmaxTag && h.tag != kDropoutTag)
      throw LoadError(std::string("model: unknown layer tag '") + h.tag + "'");
    if (h.fan_in == 0 || h.fan_out == 0 || h.fan_in > kMaxDim || h.fan_out > kMaxDim)
      throw LoadError("model: implausible layer dimensions");
  }

  Network net;
  try {
    for (const auto& h : headers) {
      if (h.tag == kDropoutTag) {
        if (h.fan_in != h.fan_out) throw LoadError("model: dropout layer with fan_in != fan_out");
        net.add(DropoutLayer{h.p, h.fan_in});
        continue;
      }
      DenseLayer d;
      d.activation = h.tag == kSigmoidTag ? Activation::sigmoid : Activation::softmax;
      d.weights.resize(h.fan_out, h.fan_in);
      d.bias.resize(h.fan_out);
      for (Eigen::Index r = 0; r < d.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < d.weights.cols(); ++c) d.weights(r, c) = binio::get_f64(in);
      for (Eigen::Index r = 0; r < d.bias.size(); ++r) d.bias(r) = binio::get_f64(in);
      net.add(std::move(d));
    }
  } catch (const InvalidArgument& e) {
    throw LoadError(std::string("model: inconsistent layer stack: ") + e.what());
  } catch (const LoadError& e) {
    throw LoadError(std::string("model: truncated or corrupt: ") + e.what());
  }
  if (in.peek() != std::char_traits<char>::eof()) throw LoadError("model: trailing bytes after weights");
  return net;
}

void save_model(const std::filesystem::path& path, const Network& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  save_model(out, net);
  if (!out) throw IoError(path.string(), "write failed");
}

Network load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open model file");
  return load_model(in);
}

}  // namespace ddah
