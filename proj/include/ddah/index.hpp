#pragma once

// Hamming-space retrieval: exhaustive scan, multi-probe semantic hashing over
// 16-bit keys with long-code re-ranking, the combined RABC+DDA distance and
// the Pearson-correlation baseline.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ddah/binary_code.hpp"
#include "ddah/code_io.hpp"
#include "ddah/nn.hpp"

namespace ddah {

/// Population count of a XOR b. Throws InvalidArgument on a length mismatch.
std::size_t hamming(const BinaryCode& a, const BinaryCode& b);

inline std::size_t hamming_words(std::span<const std::uint64_t> a, const std::uint64_t* b) {
  std::size_t d = 0;
  for (std::size_t w = 0; w < a.size(); ++w) d += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
  return d;
}

/// Codes stored contiguously, words_per_code 64-bit words each, in insertion
/// order. Ids are unique.
class CodeDatabase {
 public:
  CodeDatabase() = default;
  explicit CodeDatabase(std::size_t bits);
  static CodeDatabase from_code_set(const CodeSet& set);

  void add(std::string id, const BinaryCode& code);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t bits() const { return bits_; }
  std::size_t words_per_code() const { return words_per_code_; }
  const std::string& id(std::size_t index) const { return ids_[index]; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::uint64_t* code_words(std::size_t index) const { return words_.data() + index * words_per_code_; }
  BinaryCode code(std::size_t index) const;
  std::optional<std::size_t> find(const std::string& id) const;

 private:
  std::size_t bits_ = 0;
  std::size_t words_per_code_ = 0;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> positions_;
  std::vector<std::uint64_t> words_;
};

struct SearchHit {
  std::size_t index = 0;       // position in the database
  double distance = 0.0;       // Hamming distance, or the strategy's own distance
  std::size_t candidates = 0;  // database entries examined
};

/// First hit by Hamming distance; ties go to the smallest database index.
/// Throws InvalidState on an empty database.
SearchHit exhaustive_search(const BinaryCode& query, const CodeDatabase& db);

/// Every 16-bit key within Hamming distance <= radius of key (or exactly
/// radius when exact is set), ordered by distance then by flipped positions.
std::vector<std::uint16_t> enumerate_ball(std::uint16_t key, std::size_t radius, bool exact = false);
std::vector<BinaryCode> enumerate_ball(const BinaryCode& code, std::size_t radius, bool exact = false);

/// Hash table from 16-bit short codes to database positions (CSR layout over
/// all 65,536 keys), paired with the long-code database used for re-ranking.
class HashIndex {
 public:
  HashIndex(const CodeDatabase& short_codes, const CodeDatabase& long_codes);

  const CodeDatabase& long_codes() const { return *long_; }
  std::span<const std::uint32_t> bucket(std::uint16_t key) const;
  std::uint16_t key_of(std::size_t index) const { return keys_[index]; }
  std::size_t occupied_buckets() const;
  std::size_t size() const { return keys_.size(); }

 private:
  const CodeDatabase* long_;
  std::vector<std::uint16_t> keys_;
  std::vector<std::uint32_t> offsets_;  // 65,537 entries
  std::vector<std::uint32_t> entries_;
};

/// Probes every bucket in the radius-H ball around the query's short code and
/// re-ranks the gathered candidates by long-code distance. Returns nullopt when
/// no bucket in the ball is occupied.
std::optional<SearchHit> semantic_hash_retrieve(const BinaryCode& query_short,
                                                const BinaryCode& query_long, const HashIndex& index,
                                                std::size_t radius, bool exact = false);

/// d_a / len_a + d_b / len_b, in [0, 2].
double combined_distance(const BinaryCode& query_a, const BinaryCode& candidate_a,
                         const BinaryCode& query_b, const BinaryCode& candidate_b);

/// Exhaustive first hit under combined_distance over two parallel databases
/// (same ids, same order). Ties go to the smallest index.
SearchHit combined_search(const BinaryCode& query_a, const CodeDatabase& db_a,
                          const BinaryCode& query_b, const CodeDatabase& db_b);

/// Pearson correlation of two equal-length vectors; nullopt if either has zero
/// variance.
std::optional<double> pearson(const Vector& a, const Vector& b);

/// First hit by largest |Pearson correlation| against the columns of db.
/// Zero-variance candidates are skipped; throws InvalidArgument for a
/// zero-variance query and InvalidState when no candidate is usable.
SearchHit pearson_retrieve(const Vector& query, const Matrix& db);

}  // namespace ddah
