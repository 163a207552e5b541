#include "ddah/binary_code.hpp"

#include <string>

#include "ddah/error.hpp"

namespace ddah {

BinaryCode::BinaryCode(std::size_t length) : length_(length), words_((length + 63) / 64, 0) {}

BinaryCode BinaryCode::from_bit_string(std::string_view bits) {
  BinaryCode code(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw ParseError("bit string: expected '0' or '1'", i);
    code.set(i, bits[i] == '1');
  }
  return code;
}

BinaryCode BinaryCode::from_bytes(std::span<const std::uint8_t> bytes, std::size_t length) {
  BinaryCode code(length);
  if (bytes.size() != code.byte_count())
    throw InvalidArgument("BinaryCode::from_bytes: " + std::to_string(bytes.size()) +
                          " bytes for a " + std::to_string(length) + "-bit code");
  for (std::size_t b = 0; b < bytes.size(); ++b)
    code.words_[b / 8] |= std::uint64_t{bytes[b]} << (56 - 8 * (b % 8));
  if (length % 8 != 0) {
    const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xFFu >> (length % 8));
    if (bytes.back() & pad_mask)
      throw InvalidArgument("BinaryCode::from_bytes: non-zero pad bits");
  }
  return code;
}

BinaryCode BinaryCode::from_hex(std::string_view hex, std::size_t length) {
  const std::size_t expected = 2 * ((length + 7) / 8);
  if (hex.size() != expected)
    throw ParseError("hex code: expected " + std::to_string(expected) + " digits for " +
                         std::to_string(length) + " bits, got " + std::to_string(hex.size()),
                     0);
  auto nibble = [&](std::size_t pos) -> std::uint8_t {
    const char c = hex[pos];
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw ParseError("hex code: invalid digit", pos);
  };
  std::vector<std::uint8_t> bytes(expected / 2);
  for (std::size_t b = 0; b < bytes.size(); ++b)
    bytes[b] = static_cast<std::uint8_t>((nibble(2 * b) << 4) | nibble(2 * b + 1));
  try {
    return from_bytes(bytes, length);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("hex code: ") + e.what(), hex.size() - 1);
  }
}

std::size_t BinaryCode::popcount() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::uint16_t BinaryCode::key16() const {
  if (words_.empty()) return 0;
  return static_cast<std::uint16_t>(words_[0] >> 48);
}

BinaryCode BinaryCode::from_key16(std::uint16_t key) {
  BinaryCode code(16);
  code.words_[0] = std::uint64_t{key} << 48;
  return code;
}

std::vector<std::uint8_t> BinaryCode::to_bytes() const {
  std::vector<std::uint8_t> bytes(byte_count());
  for (std::size_t b = 0; b < bytes.size(); ++b)
    bytes[b] = static_cast<std::uint8_t>(words_[b / 8] >> (56 - 8 * (b % 8)));
  return bytes;
}

std::string BinaryCode::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * byte_count());
  for (auto byte : to_bytes()) {
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xF]);
  }
  return out;
}

std::string BinaryCode::to_bit_string() const {
  std::string out(length_, '0');
  for (std::size_t i = 0; i < length_; ++i)
    if (get(i)) out[i] = '1';
  return out;
}

}  // namespace ddah
