#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddah/binary_code.hpp"

namespace ddah {

/// Image ids paired with equal-length binary codes, as stored in a code file.
///
/// Code file layout (text, one record per line):
///   # ddah-codes v1 k=<bits> <free-form header fields>
///   <image_id> <k> <hex of packed bytes, MSB-first>
struct CodeSet {
  std::size_t bits = 0;
  std::vector<std::string> ids;
  std::vector<BinaryCode> codes;

  std::size_t size() const { return ids.size(); }
  void add(std::string id, BinaryCode code);
};

/// header_fields is appended verbatim after "k=<bits>" on the header line.
void save_codes(std::ostream& out, const CodeSet& codes, const std::string& header_fields = {});
CodeSet load_codes(std::istream& in, const std::string& source = "<stream>");

void save_codes(const std::filesystem::path& path, const CodeSet& codes,
                const std::string& header_fields = {});
CodeSet load_codes(const std::filesystem::path& path);

}  // namespace ddah
