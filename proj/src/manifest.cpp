#include "ddah/manifest.hpp"

#include <fstream>
#include <set>
#include <thread>

#include "ddah/error.hpp"

namespace ddah {

DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open manifest");
  DatasetManifest manifest;
  manifest.root = path.parent_path();
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("split=train") != std::string::npos) manifest.split = Split::train;
      if (line.find("split=test") != std::string::npos) manifest.split = Split::test;
      continue;
    }
    const auto first = line.find(';');
    if (first == std::string::npos || first == 0) fail("expected 'image_id;relative_path[;irma_code]'");
    const auto second = line.find(';', first + 1);
    ManifestEntry entry;
    entry.id = line.substr(0, first);
    entry.path = line.substr(first + 1, second == std::string::npos ? std::string::npos : second - first - 1);
    if (entry.path.empty()) fail("empty path");
    if (second != std::string::npos && second + 1 < line.size()) {
      try {
        entry.irma = IrmaCode::parse(line.substr(second + 1));
      } catch (const ParseError& e) {
        fail(e.what());
      }
    }
    if (!seen.insert(entry.id).second) fail("duplicate image id '" + entry.id + "'");
    if (check_files && !std::filesystem::exists(manifest.resolve(entry)))
      fail("image file '" + manifest.resolve(entry).string() + "' does not exist");
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  if (manifest.split == Split::train) out << "# split=train\n";
  if (manifest.split == Split::test) out << "# split=test\n";
  for (const auto& e : manifest.entries) {
    out << e.id << ';' << e.path.generic_string();
    if (e.irma) out << ';' << e.irma->to_string();
    out << '\n';
  }
}

Matrix load_images(const DatasetManifest& manifest, std::size_t size, unsigned threads) {
  const std::size_t n = manifest.size();
  Matrix images(static_cast<Eigen::Index>(size * size), static_cast<Eigen::Index>(n));
  std::vector<std::string> errors(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        images.col(static_cast<Eigen::Index>(i)) = preprocess(manifest.resolve(manifest.entries[i]), size).pixels;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += per) pool.emplace_back(work, begin, std::min(n, begin + per));
    for (auto& t : pool) t.join();
  }
  std::string failed;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty()) continue;
    if (failures++ < 10) failed += "\n  " + manifest.entries[i].id + ": " + errors[i];
  }
  if (failures) throw IoError(manifest.root.string(), std::to_string(failures) + " image(s) failed to load:" + failed);
  return images;
}

}  // namespace ddah
