#include "ddah/index.hpp"

#include <cmath>
#include <limits>

#include "ddah/error.hpp"

namespace ddah {

std::size_t hamming(const BinaryCode& a, const BinaryCode& b) {
  if (a.size() != b.size())
    throw InvalidArgument("hamming: lengths differ (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  return hamming_words(a.words(), b.words().data());
}

CodeDatabase::CodeDatabase(std::size_t bits) : bits_(bits), words_per_code_((bits + 63) / 64) {}

CodeDatabase CodeDatabase::from_code_set(const CodeSet& set) {
  CodeDatabase db(set.bits);
  for (std::size_t i = 0; i < set.size(); ++i) db.add(set.ids[i], set.codes[i]);
  return db;
}

void CodeDatabase::add(std::string id, const BinaryCode& code) {
  if (ids_.empty() && bits_ == 0) {
    bits_ = code.size();
    words_per_code_ = (bits_ + 63) / 64;
  }
  if (code.size() != bits_)
    throw InvalidArgument("CodeDatabase: code for '" + id + "' has " + std::to_string(code.size()) +
                          " bits, database holds " + std::to_string(bits_));
  if (!positions_.emplace(id, ids_.size()).second)
    throw InvalidArgument("CodeDatabase: duplicate id '" + id + "'");
  ids_.push_back(std::move(id));
  words_.insert(words_.end(), code.words().begin(), code.words().end());
}

BinaryCode CodeDatabase::code(std::size_t index) const {
  BinaryCode out(bits_);
  const auto* w = code_words(index);
  for (std::size_t i = 0; i < bits_; ++i) out.set(i, (w[i >> 6] >> (63 - (i & 63))) & 1u);
  return out;
}

std::optional<std::size_t> CodeDatabase::find(const std::string& id) const {
  const auto it = positions_.find(id);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

SearchHit exhaustive_search(const BinaryCode& query, const CodeDatabase& db) {
  if (db.empty()) throw InvalidState("exhaustive_search: empty database");
  if (query.size() != db.bits())
    throw InvalidArgument("exhaustive_search: query has " + std::to_string(query.size()) +
                          " bits, database holds " + std::to_string(db.bits()));
  const auto q = query.words();
  std::size_t best = 0;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < db.size(); ++i) {
    const std::size_t d = hamming_words(q, db.code_words(i));
    if (d < best_d) {
      best_d = d;
      best = i;
      if (d == 0) break;
    }
  }
  return {best, static_cast<double>(best_d), db.size()};
}

namespace {

// Appends key ^ mask for every mask with exactly `remaining` more bits set
// among positions >= first.
void flip_combinations(std::uint16_t key, unsigned first, std::size_t remaining,
                       std::vector<std::uint16_t>& out) {
  if (remaining == 0) {
    out.push_back(key);
    return;
  }
  for (unsigned pos = first; pos + remaining <= 16; ++pos)
    flip_combinations(static_cast<std::uint16_t>(key ^ (0x8000u >> pos)), pos + 1, remaining - 1, out);
}

}  // namespace

std::vector<std::uint16_t> enumerate_ball(std::uint16_t key, std::size_t radius, bool exact) {
  if (radius > 16) throw InvalidArgument("enumerate_ball: radius " + std::to_string(radius) + " outside [0,16]");
  std::vector<std::uint16_t> out;
  for (std::size_t h = exact ? radius : 0; h <= radius; ++h) flip_combinations(key, 0, h, out);
  return out;
}

std::vector<BinaryCode> enumerate_ball(const BinaryCode& code, std::size_t radius, bool exact) {
  if (code.size() != 16)
    throw InvalidArgument("enumerate_ball: expected a 16-bit code, got " + std::to_string(code.size()));
  std::vector<BinaryCode> out;
  for (auto key : enumerate_ball(code.key16(), radius, exact)) out.push_back(BinaryCode::from_key16(key));
  return out;
}

HashIndex::HashIndex(const CodeDatabase& short_codes, const CodeDatabase& long_codes)
    : long_(&long_codes), offsets_(65537, 0) {
  if (short_codes.bits() != 16)
    throw InvalidArgument("HashIndex: short codes must be 16 bits, got " + std::to_string(short_codes.bits()));
  if (short_codes.size() != long_codes.size())
    throw InvalidArgument("HashIndex: " + std::to_string(short_codes.size()) + " short codes but " +
                          std::to_string(long_codes.size()) + " long codes");
  if (short_codes.size() > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("HashIndex: database too large");
  for (std::size_t i = 0; i < short_codes.size(); ++i)
    if (short_codes.id(i) != long_codes.id(i))
      throw InvalidArgument("HashIndex: id mismatch at position " + std::to_string(i) + " ('" +
                            short_codes.id(i) + "' vs '" + long_codes.id(i) + "')");

  keys_.resize(short_codes.size());
  for (std::size_t i = 0; i < short_codes.size(); ++i) {
    keys_[i] = static_cast<std::uint16_t>(short_codes.code_words(i)[0] >> 48);
    ++offsets_[keys_[i] + 1u];
  }
  for (std::size_t k = 1; k < offsets_.size(); ++k) offsets_[k] += offsets_[k - 1];
  entries_.resize(short_codes.size());
  std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < keys_.size(); ++i) entries_[cursor[keys_[i]]++] = static_cast<std::uint32_t>(i);
}

std::span<const std::uint32_t> HashIndex::bucket(std::uint16_t key) const {
  return {entries_.data() + offsets_[key], entries_.data() + offsets_[key + 1u]};
}

std::size_t HashIndex::occupied_buckets() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k + 1 < offsets_.size(); ++k) n += offsets_[k + 1] != offsets_[k];
  return n;
}

std::optional<SearchHit> semantic_hash_retrieve(const BinaryCode& query_short,
                                                const BinaryCode& query_long, const HashIndex& index,
                                                std::size_t radius, bool exact) {
  if (query_short.size() != 16)
    throw InvalidArgument("semantic_hash_retrieve: short query must be 16 bits");
  const CodeDatabase& db = index.long_codes();
  if (query_long.size() != db.bits())
    throw InvalidArgument("semantic_hash_retrieve: long query has " + std::to_string(query_long.size()) +
                          " bits, database holds " + std::to_string(db.bits()));
  const auto q = query_long.words();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  std::size_t examined = 0;
  for (auto key : enumerate_ball(query_short.key16(), radius, exact)) {
    for (auto i : index.bucket(key)) {
      ++examined;
      const std::size_t d = hamming_words(q, db.code_words(i));
      if (d < best_d || (d == best_d && i < best)) {
        best_d = d;
        best = i;
      }
    }
  }
  if (examined == 0) return std::nullopt;
  return SearchHit{best, static_cast<double>(best_d), examined};
}

double combined_distance(const BinaryCode& query_a, const BinaryCode& candidate_a,
                         const BinaryCode& query_b, const BinaryCode& candidate_b) {
  if (query_a.size() == 0 || query_b.size() == 0)
    throw InvalidArgument("combined_distance: empty code");
  return static_cast<double>(hamming(query_a, candidate_a)) / static_cast<double>(query_a.size()) +
         static_cast<double>(hamming(query_b, candidate_b)) / static_cast<double>(query_b.size());
}

SearchHit combined_search(const BinaryCode& query_a, const CodeDatabase& db_a,
                          const BinaryCode& query_b, const CodeDatabase& db_b) {
  if (db_a.empty()) throw InvalidState("combined_search: empty database");
  if (db_a.size() != db_b.size())
    throw InvalidArgument("combined_search: databases differ in size");
  if (query_a.size() != db_a.bits() || query_b.size() != db_b.bits())
    throw InvalidArgument("combined_search: query lengths do not match the databases");
  // Compare d_a/len_a + d_b/len_b exactly as d_a*len_b + d_b*len_a.
  const std::size_t len_a = db_a.bits();
  const std::size_t len_b = db_b.bits();
  const auto qa = query_a.words();
  const auto qb = query_b.words();
  std::size_t best = 0;
  std::size_t best_score = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < db_a.size(); ++i) {
    const std::size_t score = hamming_words(qa, db_a.code_words(i)) * len_b +
                              hamming_words(qb, db_b.code_words(i)) * len_a;
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return {best, static_cast<double>(best_score) / static_cast<double>(len_a * len_b), db_a.size()};
}

std::optional<double> pearson(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidArgument("pearson: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const Vector da = a.array() - a.mean();
  const Vector db = b.array() - b.mean();
  const double saa = da.squaredNorm();
  const double sbb = db.squaredNorm();
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return da.dot(db) / std::sqrt(saa * sbb);
}

namespace {
// |r| values closer than this count as tied, so x and 1 - x (|r| = 1 up to
// rounding) resolve to the earlier index.
constexpr double kPearsonTieTolerance = 1e-12;
}  // namespace

SearchHit pearson_retrieve(const Vector& query, const Matrix& db) {
  if (db.cols() == 0) throw InvalidState("pearson_retrieve: empty database");
  if (query.size() != db.rows())
    throw InvalidArgument("pearson_retrieve: query length " + std::to_string(query.size()) +
                          " vs database dimension " + std::to_string(db.rows()));
  const Vector dq = query.array() - query.mean();
  const double sqq = dq.squaredNorm();
  if (!(sqq > 0.0)) throw InvalidArgument("pearson_retrieve: query has zero variance");
  std::optional<std::size_t> best;
  double best_abs = -1.0;
  for (Eigen::Index c = 0; c < db.cols(); ++c) {
    const Vector dc = db.col(c).array() - db.col(c).mean();
    const double scc = dc.squaredNorm();
    if (!(scc > 0.0)) continue;
    const double r = std::abs(dq.dot(dc) / std::sqrt(sqq * scc));
    if (r > best_abs + kPearsonTieTolerance) {
      best_abs = r;
      best = static_cast<std::size_t>(c);
    }
  }
  if (!best) throw InvalidState("pearson_retrieve: every candidate has zero variance");
  return {*best, best_abs, static_cast<std::size_t>(db.cols())};
}

}  // namespace ddah
