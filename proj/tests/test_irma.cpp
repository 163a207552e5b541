#include <algorithm>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "ddah/error.hpp"
#include "ddah/irma.hpp"
#include "ddah/rng.hpp"

using namespace ddah;

TEST_CASE("parse and format IRMA codes") {
  const auto code = IrmaCode::parse("1121-4a0-914-700");
  CHECK(code.structure(1) == "1121");
  CHECK(code.structure(2) == "4a0");
  CHECK(code.structure(3) == "914");
  CHECK(code.structure(4) == "700");
  CHECK(code.to_string() == "1121-4a0-914-700");
  CHECK(IrmaCode::parse("11214A0914700") == code);
  CHECK(code.at(2, 2) == 'a');

  try {
    IrmaCode::parse("1121 4a0-914-700");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(IrmaCode::parse("1121-4a0-914-70"), ParseError);
  CHECK_THROWS_AS(IrmaCode::parse("1121-4a0-914-7*0"), ParseError);
  CHECK_THROWS_AS(IrmaCode::parse("1121-4a0-9!4-700"), ParseError);

  Rng rng(1);
  const std::string alphabet = "0123456789abcdefghijklmnopqrstuvwxyz";
  for (int t = 0; t < 100; ++t) {
    std::string text;
    for (std::size_t i = 0; i < 16; ++i)
      text += (i == 4 || i == 8 || i == 12) ? '-' : alphabet[rng.below(alphabet.size())];
    CHECK(IrmaCode::parse(text).to_string() == text);
  }
}

TEST_CASE("delta propagates mismatches down the hierarchy") {
  const auto a = IrmaCode::parse("1121-4a0-914-700");
  for (std::size_t j = 1; j <= 4; ++j)
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i) CHECK(delta(a, a, j, i) == 0);

  const auto first = IrmaCode::parse("2121-4a0-914-700");
  for (std::size_t i = 1; i <= 4; ++i) CHECK(delta(a, first, 1, i) == 1);
  CHECK(delta(a, first, 2, 3) == 0);

  const auto last = IrmaCode::parse("1122-4a0-914-700");
  CHECK(delta(a, last, 1, 1) == 0);
  CHECK(delta(a, last, 1, 2) == 0);
  CHECK(delta(a, last, 1, 3) == 0);
  CHECK(delta(a, last, 1, 4) == 1);

  CHECK_THROWS_AS(delta(a, a, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(delta(a, a, 2, 4), InvalidArgument);
}

TEST_CASE("image error hand computations") {
  const auto table = BranchTable::uniform(10);
  const auto a = IrmaCode::parse("1121-4a0-914-700");
  CHECK(image_error(a, a, table) == 0.0);
  CHECK(std::abs(image_error(a, IrmaCode::parse("1122-4a0-914-700"), table) - 0.025) < 1e-12);
  CHECK(std::abs(image_error(a, IrmaCode::parse("2121-4a0-914-700"), table) -
                 0.1 * (1.0 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4)) < 1e-12);

  const auto breakdown = image_error_breakdown(a, IrmaCode::parse("1121-4a0-915-701"), table);
  CHECK(breakdown.per_structure[0] == 0.0);
  CHECK(std::abs(breakdown.per_structure[2] - 0.1 / 3) < 1e-12);
  CHECK(std::abs(breakdown.per_structure[3] - 0.1 / 3) < 1e-12);
  CHECK(std::abs(breakdown.total - 0.2 / 3) < 1e-12);
}

TEST_CASE("error weighting and bounds") {
  const auto table = BranchTable::uniform(4);
  const auto base = IrmaCode::parse("1111-111-111-111");
  // A mismatch at position i costs strictly more than one at i + 1.
  for (std::size_t i = 1; i < 4; ++i) {
    std::string early = "1111-111-111-111", late = early;
    early[i - 1] = '2';
    late[i] = '2';
    CHECK(image_error(base, IrmaCode::parse(early), table) > image_error(base, IrmaCode::parse(late), table));
  }
  double bound = 0.0;
  for (std::size_t j = 1; j <= 4; ++j)
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i) bound += 0.25 / static_cast<double>(i);
  const auto opposite = IrmaCode::parse("2222-222-222-222");
  CHECK(std::abs(image_error(base, opposite, table) - bound) < 1e-12);
  CHECK(image_error(base, IrmaCode::parse("2111-111-111-112"), table) < bound);
}

TEST_CASE("total error is additive and order independent") {
  const auto table = BranchTable::uniform(10);
  const auto a = IrmaCode::parse("1121-4a0-914-700");
  const auto b = IrmaCode::parse("1121-4b0-914-700");
  const auto c = IrmaCode::parse("1123-4a0-910-700");
  std::vector<IrmaPair> same{{a, a}, {b, b}};
  CHECK(total_error(same, table) == 0.0);
  std::vector<IrmaPair> twice{{a, b}, {a, b}};
  CHECK(std::abs(total_error(twice, table) - 2 * image_error(a, b, table)) < 1e-12);
  std::vector<IrmaPair> pairs{{a, b}, {b, c}, {c, a}, {a, c}};
  const double total = total_error(pairs, table);
  std::sort(pairs.begin(), pairs.end());
  do {
    CHECK(std::abs(total_error(pairs, table) - total) < 1e-12);
  } while (std::next_permutation(pairs.begin(), pairs.end()));
}

TEST_CASE("branch table construction") {
  std::vector<IrmaCode> codes{IrmaCode::parse("1121-4a0-914-700"), IrmaCode::parse("2121-4a0-914-700")};
  const auto table = build_branch_table(codes);
  CHECK(table.count(1, 1) == 2);
  CHECK(table.count(1, 2) == 1);
  CHECK(table.count(4, 3) == 1);

  const auto single = build_branch_table(std::vector<IrmaCode>{codes[0]});
  for (std::size_t j = 1; j <= 4; ++j)
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i) CHECK(single.count(j, i) == 1);

  auto with_dup = codes;
  with_dup.push_back(codes[1]);
  const auto dup_table = build_branch_table(with_dup);
  for (std::size_t j = 1; j <= 4; ++j)
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i) CHECK(dup_table.count(j, i) == table.count(j, i));

  // Prefix-conditioned: position 2 of structure 1 follows prefixes "1" and
  // "2"; "1" is followed by {1, 2}, "2" by {1}, giving (2 + 1) / 2.
  std::vector<IrmaCode> tree{IrmaCode::parse("1121-4a0-914-700"), IrmaCode::parse("1221-4a0-914-700"),
                             IrmaCode::parse("2121-4a0-914-700")};
  const auto cond = build_branch_table(tree, true);
  CHECK(cond.count(1, 1) == 2);
  CHECK(cond.count(1, 2) == 1.5);
  CHECK(build_branch_table(tree, false).count(1, 2) == 2);

  CHECK_THROWS_AS(build_branch_table(std::vector<IrmaCode>{}), InvalidArgument);
}

TEST_CASE("branch table file round trip and validation") {
  const auto dir = std::filesystem::temp_directory_path() / "ddah_irma_test";
  std::filesystem::create_directories(dir);
  BranchTable table = BranchTable::uniform(3);
  table.set(2, 3, 7.5);
  table.save(dir / "b.txt");
  const auto back = BranchTable::load(dir / "b.txt");
  CHECK(back.count(2, 3) == 7.5);
  CHECK(back.count(1, 1) == 3);

  std::ofstream(dir / "partial.txt") << "1,1,4\n";
  CHECK_THROWS_AS(BranchTable::load(dir / "partial.txt"), InvalidState);
  std::ofstream(dir / "bad.txt") << "1;1;4\n";
  CHECK_THROWS_AS(BranchTable::load(dir / "bad.txt"), LoadError);

  save_irma_codes(dir / "codes.txt", {{"a", IrmaCode::parse("1121-4a0-914-700")}});
  CHECK(load_irma_codes(dir / "codes.txt").at("a").to_string() == "1121-4a0-914-700");
  std::filesystem::remove_all(dir);
}
