#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ddah/image.hpp"
#include "ddah/irma.hpp"
#include "ddah/manifest.hpp"

namespace ddah {

/// Deterministic stand-in for a radiograph collection. Image i belongs to
/// class i % classes. Each class draws an ellipse "body" and a bar "bone" with
/// class-specific placement; images jitter those parameters and add noise.
/// Classes come in groups of three sharing a shape family and the directional
/// structure of their IRMA-style code, so the codes form a small hierarchy.
struct SyntheticDataset {
  std::vector<std::string> ids;
  std::vector<GrayImage> images;
  std::vector<IrmaCode> codes;
  std::vector<std::size_t> labels;

  std::size_t size() const { return ids.size(); }
};

SyntheticDataset generate_synthetic(std::size_t n, std::size_t classes, std::size_t size, std::uint64_t seed);

/// Code assigned to class c.
IrmaCode synthetic_class_code(std::size_t c);

struct SyntheticSplit {
  DatasetManifest train;
  DatasetManifest test;
};

/// Deterministic stratified split: within every class, members are spread
/// over the test set at the given fraction.
std::vector<bool> synthetic_test_mask(const SyntheticDataset& data, double test_fraction);

/// Writes images/<id>.pgm, train.manifest, test.manifest and irma_codes.txt
/// under dir.
SyntheticSplit write_synthetic(const std::filesystem::path& dir, const SyntheticDataset& data, double test_fraction);

}  // namespace ddah
