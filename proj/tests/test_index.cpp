#include <set>

#include "doctest.h"
#include "ddah/error.hpp"
#include "ddah/index.hpp"
#include "support/oracles.hpp"

using namespace ddah;

namespace {

BinaryCode random_code(std::size_t k, Rng& rng) {
  BinaryCode c(k);
  for (std::size_t i = 0; i < k; ++i) c.set(i, rng.bernoulli(0.5));
  return c;
}

BinaryCode complement(const BinaryCode& c) {
  BinaryCode out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out.set(i, !c.get(i));
  return out;
}

}  // namespace

TEST_CASE("hamming basics") {
  CHECK(hamming(BinaryCode::from_bit_string("1010"), BinaryCode::from_bit_string("1001")) == 2);
  Rng rng(1);
  const auto x = random_code(512, rng);
  CHECK(hamming(x, x) == 0);
  CHECK(hamming(x, complement(x)) == 512);
  CHECK_THROWS_AS(hamming(BinaryCode(4), BinaryCode(5)), InvalidArgument);
}

TEST_CASE("hamming is a metric") {
  Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    const std::size_t k = 1 + rng.below(300);
    const auto a = random_code(k, rng), b = random_code(k, rng), c = random_code(k, rng);
    CHECK(hamming(a, b) == hamming(b, a));
    CHECK(hamming(a, c) <= hamming(a, b) + hamming(b, c));
    CHECK((hamming(a, b) == 0) == (a == b));
    CHECK(hamming(a, b) == oracle::naive_hamming(a, b));
  }
}

TEST_CASE("exhaustive search ties go to the earliest entry") {
  CodeDatabase db;
  db.add("a", BinaryCode::from_bit_string("000"));
  db.add("b", BinaryCode::from_bit_string("011"));
  db.add("c", BinaryCode::from_bit_string("111"));
  const auto hit = exhaustive_search(BinaryCode::from_bit_string("001"), db);
  CHECK(db.id(hit.index) == "a");
  CHECK(hit.distance == 1);
  CHECK(db.id(exhaustive_search(BinaryCode::from_bit_string("111"), db).index) == "c");

  CHECK_THROWS_AS(exhaustive_search(BinaryCode(3), CodeDatabase(3)), InvalidState);
  CHECK_THROWS_AS(exhaustive_search(BinaryCode(4), db), InvalidArgument);
  CHECK_THROWS_AS(db.add("a", BinaryCode(3)), InvalidArgument);
}

TEST_CASE("exhaustive search matches the double-loop oracle") {
  Rng rng(3);
  std::vector<BinaryCode> codes;
  CodeDatabase db;
  for (int i = 0; i < 300; ++i) {
    codes.push_back(random_code(64, rng));
    db.add("id" + std::to_string(i), codes.back());
  }
  for (int q = 0; q < 200; ++q) {
    const auto query = random_code(64, rng);
    CHECK(exhaustive_search(query, db).index == oracle::naive_first_hit(query, codes));
  }
}

TEST_CASE("ball enumeration") {
  CHECK(enumerate_ball(std::uint16_t{0x1234}, 0).size() == 1);
  CHECK(enumerate_ball(std::uint16_t{0x1234}, 2).size() == 137);
  const auto full = enumerate_ball(std::uint16_t{0xbeef}, 16);
  CHECK(full.size() == 65536);
  CHECK(std::set<std::uint16_t>(full.begin(), full.end()).size() == 65536);
  CHECK(enumerate_ball(std::uint16_t{7}, 2, true).size() == 120);
  CHECK_THROWS_AS(enumerate_ball(std::uint16_t{0}, 17), InvalidArgument);

  const auto code = BinaryCode::from_key16(0xf00f);
  for (const auto& c : enumerate_ball(code, 3)) CHECK(hamming(c, code) <= 3);
  CHECK_THROWS_AS(enumerate_ball(BinaryCode(12), 1), InvalidArgument);
}

TEST_CASE("hash index buckets") {
  Rng rng(4);
  CodeDatabase shorts, longs;
  for (int i = 0; i < 500; ++i) {
    const std::string id = "x" + std::to_string(i);
    shorts.add(id, random_code(16, rng));
    longs.add(id, random_code(128, rng));
  }
  const HashIndex index(shorts, longs);
  std::size_t total = 0;
  std::set<std::uint32_t> seen;
  for (std::uint32_t key = 0; key < 65536; ++key) {
    for (auto i : index.bucket(static_cast<std::uint16_t>(key))) {
      CHECK(shorts.code(i).key16() == key);
      seen.insert(i);
      ++total;
    }
  }
  CHECK(total == 500);
  CHECK(seen.size() == 500);

  CodeDatabase mismatch;
  mismatch.add("other", random_code(128, rng));
  CHECK_THROWS_AS(HashIndex(shorts, mismatch), InvalidArgument);
  CHECK_THROWS_AS(HashIndex(longs, longs), InvalidArgument);
}

TEST_CASE("semantic hashing: contract, soundness, completeness and monotonicity") {
  Rng rng(5);
  CodeDatabase shorts, longs;
  for (int i = 0; i < 2000; ++i) {
    const std::string id = "x" + std::to_string(i);
    shorts.add(id, random_code(16, rng));
    longs.add(id, random_code(256, rng));
  }
  const HashIndex index(shorts, longs);

  for (int q = 0; q < 100; ++q) {
    const auto qs = random_code(16, rng);
    const auto ql = random_code(256, rng);
    const auto full = semantic_hash_retrieve(qs, ql, index, 16);
    REQUIRE(full);
    CHECK(full->index == exhaustive_search(ql, longs).index);
    CHECK(full->candidates == 2000);

    double previous = 1e9;
    for (std::size_t h = 0; h <= 4; ++h) {
      const auto hit = semantic_hash_retrieve(qs, ql, index, h);
      if (!hit) continue;
      CHECK(hamming(shorts.code(hit->index), qs) <= h);
      CHECK(hit->distance <= previous);
      previous = hit->distance;
    }
  }

  // H = 0 on a query whose short code is in the table: best long match within
  // that bucket only.
  const auto key = shorts.code(10);
  const auto bucket = index.bucket(key.key16());
  const auto ql = random_code(256, rng);
  std::size_t best = bucket[0];
  for (auto i : bucket)
    if (hamming(longs.code(i), ql) < hamming(longs.code(best), ql)) best = i;
  const auto hit = semantic_hash_retrieve(key, ql, index, 0);
  REQUIRE(hit);
  CHECK(hit->index == best);
  CHECK(hit->candidates == bucket.size());
}

TEST_CASE("semantic hashing signals an empty candidate set") {
  CodeDatabase shorts, longs;
  shorts.add("only", BinaryCode::from_key16(0x0000));
  longs.add("only", BinaryCode(64));
  const HashIndex index(shorts, longs);
  CHECK_FALSE(semantic_hash_retrieve(BinaryCode::from_key16(0xffff), BinaryCode(64), index, 2).has_value());
  CHECK(semantic_hash_retrieve(BinaryCode::from_key16(0xffff), BinaryCode(64), index, 16).has_value());
}

TEST_CASE("combined distance") {
  Rng rng(6);
  const auto a = random_code(2048, rng), b = random_code(512, rng);
  CHECK(combined_distance(a, a, b, b) == 0.0);
  CHECK(combined_distance(a, complement(a), b, complement(b)) == 2.0);
  BinaryCode half_a(2048), half_b(512);
  for (std::size_t i = 0; i < 1024; ++i) half_a.set(i, true);
  for (std::size_t i = 0; i < 256; ++i) half_b.set(i, true);
  CHECK(combined_distance(BinaryCode(2048), half_a, BinaryCode(512), half_b) == 1.0);
  CHECK_THROWS_AS(combined_distance(a, b, b, b), InvalidArgument);

  CodeDatabase rabc, dda;
  for (int i = 0; i < 50; ++i) {
    rabc.add(std::to_string(i), random_code(2048, rng));
    dda.add(std::to_string(i), random_code(512, rng));
  }
  const auto qa = random_code(2048, rng), qb = random_code(512, rng);
  const auto hit = combined_search(qa, rabc, qb, dda);
  for (std::size_t i = 0; i < 50; ++i)
    CHECK(combined_distance(qa, rabc.code(i), qb, dda.code(i)) >= hit.distance - 1e-15);
}

TEST_CASE("pearson retrieval") {
  Rng rng(7);
  Matrix db(20, 30);
  for (Eigen::Index c = 0; c < db.cols(); ++c)
    for (Eigen::Index r = 0; r < db.rows(); ++r) db(r, c) = rng.uniform();
  const Vector query = db.col(12);
  CHECK(pearson_retrieve(query, db).index == 12);

  Matrix with_negated = db;
  with_negated.col(4) = (1.0 - query.array()).matrix();
  CHECK(pearson_retrieve(query, with_negated).index == 4);

  // Zero-variance candidate is skipped; zero-variance query is an error.
  Matrix flat = db;
  flat.col(0).setConstant(0.3);
  CHECK(pearson_retrieve(query, flat).index == 12);
  CHECK_THROWS_AS(pearson_retrieve(Vector::Constant(20, 0.5), db), InvalidArgument);

  // Direct-formula oracle.
  for (int t = 0; t < 100; ++t) {
    Vector q(20);
    for (Eigen::Index i = 0; i < 20; ++i) q(i) = rng.uniform();
    std::size_t best = 0;
    double best_r = -1;
    for (Eigen::Index c = 0; c < db.cols(); ++c) {
      const double r = std::abs(oracle::direct_pearson(q, db.col(c)));
      if (r > best_r) {
        best_r = r;
        best = static_cast<std::size_t>(c);
      }
    }
    CHECK(pearson_retrieve(q, db).index == best);
  }
}
