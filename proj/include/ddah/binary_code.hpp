#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddah {

/// Fixed-length packed bit vector.
///
/// Bits are packed MSB-first into 64-bit words: bit i lives in word i / 64 at
/// bit position 63 - i % 64. Serialized as bytes this is the same order, bit i
/// of the code is bit 7 - i % 8 of byte i / 8. Pad bits past length() are
/// always zero, so word-wise XOR + popcount gives the Hamming distance.
class BinaryCode {
 public:
  BinaryCode() = default;
  explicit BinaryCode(std::size_t length);

  /// Parses a string of '0'/'1' characters.
  static BinaryCode from_bit_string(std::string_view bits);
  static BinaryCode from_bytes(std::span<const std::uint8_t> bytes, std::size_t length);
  static BinaryCode from_hex(std::string_view hex, std::size_t length);

  std::size_t size() const { return length_; }
  std::size_t byte_count() const { return (length_ + 7) / 8; }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (63 - (i & 63))) & 1u; }
  void set(std::size_t i, bool value) {
    const std::uint64_t bit = std::uint64_t{1} << (63 - (i & 63));
    if (value)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (63 - (i & 63)); }

  std::size_t popcount() const;

  std::span<const std::uint64_t> words() const { return words_; }

  /// First min(16, length) bits as an integer, bit 0 of the code in the most
  /// significant position. Used as the semantic-hashing table key.
  std::uint16_t key16() const;
  static BinaryCode from_key16(std::uint16_t key);

  std::vector<std::uint8_t> to_bytes() const;
  std::string to_hex() const;
  std::string to_bit_string() const;

  friend bool operator==(const BinaryCode&, const BinaryCode&) = default;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace ddah
