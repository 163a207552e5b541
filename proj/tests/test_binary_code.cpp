#include <sstream>

#include "doctest.h"
#include "ddah/binary_code.hpp"
#include "ddah/code_io.hpp"
#include "ddah/error.hpp"
#include "ddah/rng.hpp"

using namespace ddah;

TEST_CASE("bit layout is MSB-first with zero padding") {
  BinaryCode code(12);
  code.set(0, true);
  code.set(9, true);
  const auto bytes = code.to_bytes();
  REQUIRE(bytes.size() == 2);
  CHECK(bytes[0] == 0x80);
  CHECK(bytes[1] == 0x40);
  CHECK(code.to_hex() == "8040");
  CHECK(code.to_bit_string() == "100000000100");
  CHECK(code.popcount() == 2);

  CHECK_THROWS_AS(BinaryCode::from_hex("804f", 12), ParseError);  // pad bits set
  CHECK_THROWS_AS(BinaryCode::from_hex("80", 12), ParseError);
  CHECK_THROWS_AS(BinaryCode::from_hex("80zz", 12), ParseError);
  CHECK(BinaryCode::from_hex("8040", 12) == code);
}

TEST_CASE("key16 reads the first sixteen bits") {
  const auto code = BinaryCode::from_bit_string("1000000000000001");
  CHECK(code.key16() == 0x8001);
  CHECK(BinaryCode::from_key16(0x8001) == code);
}

TEST_CASE("hex and byte encodings round-trip for random codes of any length") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng.below(700);
    BinaryCode code(k);
    for (std::size_t i = 0; i < k; ++i) code.set(i, rng.bernoulli(0.5));
    CHECK(BinaryCode::from_hex(code.to_hex(), k) == code);
    CHECK(BinaryCode::from_bytes(code.to_bytes(), k) == code);
    CHECK(BinaryCode::from_bit_string(code.to_bit_string()) == code);
  }
}

TEST_CASE("code files round-trip and reject malformed input") {
  CodeSet set;
  set.add("a", BinaryCode::from_bit_string("1010101011"));
  set.add("b", BinaryCode::from_bit_string("0000000001"));
  std::stringstream buf;
  save_codes(buf, set, "seed=3");
  const std::string text = buf.str();
  CHECK(text.rfind("# ddah-codes v1 k=10 seed=3\n", 0) == 0);
  CHECK(text.find("a 10 aac0\n") != std::string::npos);

  std::stringstream in(text);
  const CodeSet back = load_codes(in);
  CHECK(back.bits == 10);
  CHECK(back.ids == set.ids);
  CHECK(back.codes == set.codes);

  std::stringstream bad_header("a 10 aac0\n");
  CHECK_THROWS_AS(load_codes(bad_header), LoadError);
  std::stringstream bad_len("# ddah-codes v1 k=10\na 12 aac0\n");
  CHECK_THROWS_AS(load_codes(bad_len), LoadError);

  CHECK_THROWS_AS(set.add("c", BinaryCode(11)), InvalidArgument);
  CHECK_THROWS_AS(set.add("has space", BinaryCode(10)), InvalidArgument);
}
