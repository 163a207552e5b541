#pragma once

// IRMA codes and the hierarchical retrieval error.
//
// Structures j = 1..4 (technical, directional, anatomical, biological) have
// lengths 4, 3, 3, 3. Positions i are 1-based within their structure. The
// error of one query/retrieved pair is
//
//   sum_j sum_i (1 / b(j,i)) * (1 / i) * delta(j,i)
//
// where delta(j,i) = 1 iff some position h <= i of structure j differs, and
// b(j,i) is the number of branches at that position.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ddah {

inline constexpr std::array<std::size_t, 4> kIrmaStructureLengths{4, 3, 3, 3};
inline constexpr std::size_t kIrmaLength = 13;

class IrmaCode {
 public:
  IrmaCode() { chars_.fill('0'); }

  /// Accepts "TTTT-DDD-AAA-BBB" or the bare 13-character form; case is folded
  /// to lower. Throws ParseError naming the offending position.
  static IrmaCode parse(std::string_view text);

  /// Canonical hyphenated form.
  std::string to_string() const;

  /// Structure j (1-based) as a view of its characters.
  std::string_view structure(std::size_t j) const;
  /// Character at structure j, position i (both 1-based).
  char at(std::size_t j, std::size_t i) const;

  friend bool operator==(const IrmaCode&, const IrmaCode&) = default;
  friend auto operator<=>(const IrmaCode&, const IrmaCode&) = default;

 private:
  std::array<char, kIrmaLength> chars_;
};

/// Branch counts b(j,i) for every structure/position, each >= 1. Counts may be
/// fractional in prefix-conditioned mode.
class BranchTable {
 public:
  BranchTable();
  static BranchTable uniform(double count);

  double count(std::size_t j, std::size_t i) const;
  void set(std::size_t j, std::size_t i, double count);

  /// Text form: one "j,i,count" line per entry; '#' lines are comments.
  void save(const std::filesystem::path& path) const;
  static BranchTable load(const std::filesystem::path& path);

 private:
  static std::size_t slot(std::size_t j, std::size_t i);
  std::array<double, kIrmaLength> counts_;
};

/// Default mode counts distinct characters seen at each (j,i) over the set.
/// Prefix-conditioned mode averages, over the distinct prefixes (positions
/// < i of structure j), the number of distinct characters following each.
BranchTable build_branch_table(std::span<const IrmaCode> codes, bool prefix_conditioned = false);

/// 0 iff the first i characters of structure j agree.
int delta(const IrmaCode& query, const IrmaCode& retrieved, std::size_t j, std::size_t i);

struct IrmaError {
  double total = 0.0;
  std::array<double, 4> per_structure{};

  IrmaError& operator+=(const IrmaError& other);
};

IrmaError image_error_breakdown(const IrmaCode& query, const IrmaCode& retrieved, const BranchTable& table);
double image_error(const IrmaCode& query, const IrmaCode& retrieved, const BranchTable& table);

using IrmaPair = std::pair<IrmaCode, IrmaCode>;  // (query, retrieved)

IrmaError total_error_breakdown(std::span<const IrmaPair> pairs, const BranchTable& table);
double total_error(std::span<const IrmaPair> pairs, const BranchTable& table);

/// "image_id;TTTT-DDD-AAA-BBB" per line.
std::map<std::string, IrmaCode> load_irma_codes(const std::filesystem::path& path);
void save_irma_codes(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, IrmaCode>>& codes);

}  // namespace ddah
