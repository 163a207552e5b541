#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ddah/image.hpp"
#include "ddah/irma.hpp"

namespace ddah {

enum class Split { train, test, unspecified };

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;  // as written in the manifest, relative to root
  std::optional<IrmaCode> irma;
};

/// Lines "image_id;relative_path;irma_code", the code being optional. A
/// "# split=train" (or test) comment tags the split.
struct DatasetManifest {
  std::filesystem::path root;
  Split split = Split::unspecified;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& entry) const { return root / entry.path; }
  std::size_t size() const { return entries.size(); }
};

/// Relative paths resolve against the manifest's directory. With check_files
/// set every referenced file must exist.
DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files = true);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Preprocesses every image to size x size; column k of the result is entry k.
Matrix load_images(const DatasetManifest& manifest, std::size_t size, unsigned threads = 1);

}  // namespace ddah
