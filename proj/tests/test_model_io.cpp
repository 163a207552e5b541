#include <sstream>

#include "doctest.h"
#include "ddah/error.hpp"
#include "ddah/model_io.hpp"

using namespace ddah;

namespace {

Network sample_model() {
  Rng rng(17);
  return Network({DenseLayer::glorot(12, 8, Activation::sigmoid, rng), DropoutLayer{0.2, 8},
                  DenseLayer::glorot(8, 3, Activation::sigmoid, rng),
                  DenseLayer::glorot(3, 8, Activation::sigmoid, rng),
                  DenseLayer::glorot(8, 12, Activation::softmax, rng)});
}

}  // namespace

TEST_CASE("model save -> load -> save is byte identical") {
  const Network net = sample_model();
  std::stringstream first;
  save_model(first, net);
  const std::string bytes = first.str();
  CHECK(bytes.substr(0, 5) == "DDAH1");
  // header: magic + count + 5 * (tag + 2*u32 + f64), weights: all doubles
  const std::size_t params = 12 * 8 + 8 + 8 * 3 + 3 + 3 * 8 + 8 + 8 * 12 + 12;
  CHECK(bytes.size() == 5 + 4 + 5 * 17 + 8 * params);

  std::stringstream in(bytes);
  const Network back = load_model(in);
  REQUIRE(back.size() == net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (const auto* d = std::get_if<DenseLayer>(&net.layers()[i])) {
      const auto& e = std::get<DenseLayer>(back.layers()[i]);
      CHECK(d->weights == e.weights);
      CHECK(d->bias == e.bias);
      CHECK(d->activation == e.activation);
    } else {
      CHECK(std::get<DropoutLayer>(back.layers()[i]).p == 0.2);
    }
  }
  std::stringstream second;
  save_model(second, back);
  CHECK(second.str() == bytes);
}

TEST_CASE("model loading rejects bad magic, truncation and trailing data") {
  std::stringstream out;
  save_model(out, sample_model());
  const std::string bytes = out.str();

  std::stringstream wrong("XXXX1" + bytes.substr(5));
  try {
    load_model(wrong);
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    const std::string what = e.what();
    CHECK(what.find("DDAH1") != std::string::npos);
    CHECK(what.find("XXXX1") != std::string::npos);
  }

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_model(truncated), LoadError);
  std::stringstream trailing(bytes + "x");
  CHECK_THROWS_AS(load_model(trailing), LoadError);
}
