#include "ddah/irma.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "ddah/error.hpp"

namespace ddah {

namespace {

constexpr std::array<std::size_t, 4> kStructureOffsets{0, 4, 7, 10};

bool valid_char(char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z'); }

void check_index(std::size_t j, std::size_t i) {
  if (j < 1 || j > 4) throw InvalidArgument("irma: structure index " + std::to_string(j) + " outside [1,4]");
  if (i < 1 || i > kIrmaStructureLengths[j - 1])
    throw InvalidArgument("irma: position " + std::to_string(i) + " outside structure " +
                          std::to_string(j) + " of length " +
                          std::to_string(kIrmaStructureLengths[j - 1]));
}

}  // namespace

IrmaCode IrmaCode::parse(std::string_view text) {
  IrmaCode code;
  std::size_t out = 0;
  if (text.size() == kIrmaLength + 3) {
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
      const bool separator = pos == 4 || pos == 8 || pos == 12;
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(text[pos])));
      if (separator) {
        if (c != '-') throw ParseError("irma code: expected '-' separator", pos);
        continue;
      }
      if (!valid_char(c)) throw ParseError("irma code: invalid character '" + std::string(1, text[pos]) + "'", pos);
      code.chars_[out++] = c;
    }
  } else if (text.size() == kIrmaLength) {
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(text[pos])));
      if (!valid_char(c)) throw ParseError("irma code: invalid character '" + std::string(1, text[pos]) + "'", pos);
      code.chars_[out++] = c;
    }
  } else {
    throw ParseError("irma code: expected 13 characters or TTTT-DDD-AAA-BBB, got length " +
                         std::to_string(text.size()),
                     std::min(text.size(), kIrmaLength));
  }
  return code;
}

std::string IrmaCode::to_string() const {
  std::string out;
  for (std::size_t j = 1; j <= 4; ++j) {
    if (j > 1) out.push_back('-');
    out.append(structure(j));
  }
  return out;
}

std::string_view IrmaCode::structure(std::size_t j) const {
  if (j < 1 || j > 4) throw InvalidArgument("irma: structure index " + std::to_string(j) + " outside [1,4]");
  return {chars_.data() + kStructureOffsets[j - 1], kIrmaStructureLengths[j - 1]};
}

char IrmaCode::at(std::size_t j, std::size_t i) const {
  check_index(j, i);
  return chars_[kStructureOffsets[j - 1] + i - 1];
}

BranchTable::BranchTable() { counts_.fill(1.0); }

BranchTable BranchTable::uniform(double count) {
  BranchTable table;
  for (std::size_t j = 1; j <= 4; ++j)
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i) table.set(j, i, count);
  return table;
}

std::size_t BranchTable::slot(std::size_t j, std::size_t i) {
  check_index(j, i);
  return kStructureOffsets[j - 1] + i - 1;
}

double BranchTable::count(std::size_t j, std::size_t i) const { return counts_[slot(j, i)]; }

void BranchTable::set(std::size_t j, std::size_t i, double count) {
  if (!(count >= 1.0)) throw InvalidArgument("branch table: count must be >= 1");
  counts_[slot(j, i)] = count;
}

void BranchTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.precision(17);
  out << "# j,i,count\n";
  for (std::size_t j = 1; j <= 4; ++j)
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i)
      out << j << ',' << i << ',' << count(j, i) << '\n';
}

BranchTable BranchTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open branch table");
  BranchTable table;
  std::array<bool, kIrmaLength> seen{};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::size_t j = 0, i = 0;
    double count = 0.0;
    char c1 = 0, c2 = 0;
    if (!(fields >> j >> c1 >> i >> c2 >> count) || c1 != ',' || c2 != ',')
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": expected 'j,i,count'");
    try {
      table.set(j, i, count);
      seen[slot(j, i)] = true;
    } catch (const InvalidArgument& e) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (std::size_t j = 1; j <= 4; ++j)
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i)
      if (!seen[slot(j, i)])
        throw InvalidState(path.string() + ": branch table lacks entry " + std::to_string(j) + "," +
                           std::to_string(i));
  return table;
}

BranchTable build_branch_table(std::span<const IrmaCode> codes, bool prefix_conditioned) {
  if (codes.empty()) throw InvalidArgument("build_branch_table: no codes");
  BranchTable table;
  for (std::size_t j = 1; j <= 4; ++j) {
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i) {
      double count = 0.0;
      if (!prefix_conditioned) {
        std::set<char> distinct;
        for (const auto& c : codes) distinct.insert(c.at(j, i));
        count = static_cast<double>(distinct.size());
      } else {
        std::map<std::string_view, std::set<char>> by_prefix;
        for (const auto& c : codes) by_prefix[c.structure(j).substr(0, i - 1)].insert(c.at(j, i));
        double sum = 0.0;
        for (const auto& [prefix, chars] : by_prefix) sum += static_cast<double>(chars.size());
        count = sum / static_cast<double>(by_prefix.size());
      }
      table.set(j, i, std::max(1.0, count));
    }
  }
  return table;
}

int delta(const IrmaCode& query, const IrmaCode& retrieved, std::size_t j, std::size_t i) {
  check_index(j, i);
  for (std::size_t h = 1; h <= i; ++h)
    if (query.at(j, h) != retrieved.at(j, h)) return 1;
  return 0;
}

IrmaError& IrmaError::operator+=(const IrmaError& other) {
  total += other.total;
  for (std::size_t j = 0; j < 4; ++j) per_structure[j] += other.per_structure[j];
  return *this;
}

IrmaError image_error_breakdown(const IrmaCode& query, const IrmaCode& retrieved, const BranchTable& table) {
  IrmaError err;
  for (std::size_t j = 1; j <= 4; ++j) {
    double sum = 0.0;
    for (std::size_t i = 1; i <= kIrmaStructureLengths[j - 1]; ++i)
      if (delta(query, retrieved, j, i))
        sum += (1.0 / table.count(j, i)) * (1.0 / static_cast<double>(i));
    err.per_structure[j - 1] = sum;
    err.total += sum;
  }
  return err;
}

double image_error(const IrmaCode& query, const IrmaCode& retrieved, const BranchTable& table) {
  return image_error_breakdown(query, retrieved, table).total;
}

IrmaError total_error_breakdown(std::span<const IrmaPair> pairs, const BranchTable& table) {
  IrmaError err;
  for (const auto& [query, retrieved] : pairs) err += image_error_breakdown(query, retrieved, table);
  return err;
}

double total_error(std::span<const IrmaPair> pairs, const BranchTable& table) {
  return total_error_breakdown(pairs, table).total;
}

std::map<std::string, IrmaCode> load_irma_codes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open IRMA code file");
  std::map<std::string, IrmaCode> codes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto sep = line.find(';');
    if (sep == std::string::npos || sep == 0)
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": expected 'image_id;code'");
    try {
      if (!codes.emplace(line.substr(0, sep), IrmaCode::parse(line.substr(sep + 1))).second)
        throw LoadError("duplicate image id '" + line.substr(0, sep) + "'");
    } catch (const std::runtime_error& e) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return codes;
}

void save_irma_codes(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, IrmaCode>>& codes) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  for (const auto& [id, code] : codes) out << id << ';' << code.to_string() << '\n';
}

}  // namespace ddah
