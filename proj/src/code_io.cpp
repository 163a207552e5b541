#include "ddah/code_io.hpp"

#include <fstream>
#include <sstream>

#include "ddah/error.hpp"

namespace ddah {

namespace {
constexpr std::string_view kHeaderTag = "# ddah-codes v1";
}

void CodeSet::add(std::string id, BinaryCode code) {
  if (ids.empty() && bits == 0) bits = code.size();
  if (code.size() != bits)
    throw InvalidArgument("CodeSet: code for '" + id + "' has " + std::to_string(code.size()) +
                          " bits, set holds " + std::to_string(bits));
  if (id.empty() || id.find_first_of(" \t\r\n;") != std::string::npos)
    throw InvalidArgument("CodeSet: image id '" + id + "' must be a non-empty token");
  ids.push_back(std::move(id));
  codes.push_back(std::move(code));
}

void save_codes(std::ostream& out, const CodeSet& codes, const std::string& header_fields) {
  out << kHeaderTag << " k=" << codes.bits;
  if (!header_fields.empty()) out << ' ' << header_fields;
  out << '\n';
  for (std::size_t i = 0; i < codes.size(); ++i)
    out << codes.ids[i] << ' ' << codes.codes[i].size() << ' ' << codes.codes[i].to_hex() << '\n';
}

CodeSet load_codes(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kHeaderTag, 0) != 0)
    throw LoadError(source + ": missing '" + std::string(kHeaderTag) + "' header");
  CodeSet set;
  {
    std::istringstream header(line.substr(kHeaderTag.size()));
    std::string field;
    bool found = false;
    while (header >> field) {
      if (field.rfind("k=", 0) == 0) {
        set.bits = std::stoul(field.substr(2));
        found = true;
      }
    }
    if (!found) throw LoadError(source + ": header lacks k=<bits>");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id, hex;
    std::size_t k = 0;
    if (!(fields >> id >> k >> hex))
      throw LoadError(source + ":" + std::to_string(line_no) + ": malformed record");
    if (k != set.bits)
      throw LoadError(source + ":" + std::to_string(line_no) + ": code length " + std::to_string(k) +
                      " differs from header k=" + std::to_string(set.bits));
    try {
      set.add(id, BinaryCode::from_hex(hex, k));
    } catch (const std::exception& e) {
      throw LoadError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return set;
}

void save_codes(const std::filesystem::path& path, const CodeSet& codes,
                const std::string& header_fields) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  save_codes(out, codes, header_fields);
  if (!out) throw IoError(path.string(), "write failed");
}

CodeSet load_codes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open code file");
  return load_codes(in, path.string());
}

}  // namespace ddah
